#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pforest {

using Degree = std::int64_t;
using Count = std::int64_t;

/// Node-degree histogram of a plane forest: counts[i] nodes have i children.
///
/// Only nonzero counts are stored. A valid sequence has n >= 1 nodes and
/// c = sum (1 - i) counts[i] >= 1 trees.
class DegreeSequence {
 public:
  /// Throws Error{EmptySequence} when n = 0, Error{NotAForest} when c <= 0,
  /// Error{InvalidArgument} for negative degrees or counts.
  static DegreeSequence validate(const std::map<Degree, Count>& counts);

  const std::map<Degree, Count>& counts() const { return counts_; }
  Count count(Degree i) const;
  Count n() const { return n_; }
  Count c() const { return c_; }
  Degree max_degree() const { return counts_.rbegin()->first; }

  bool operator==(const DegreeSequence&) const = default;

 private:
  DegreeSequence() = default;

  std::map<Degree, Count> counts_;
  Count n_ = 0;
  Count c_ = 0;
};

inline DegreeSequence validate(const std::map<Degree, Count>& counts) {
  return DegreeSequence::validate(counts);
}

/// Weakly increasing vector with counts[i] copies of i.
using DegreeVector = std::vector<Degree>;

DegreeVector degree_vector(const DegreeSequence& s);

/// Histogram of an arbitrary degree list, validated as a forest sequence.
DegreeSequence histogram(std::span<const Degree> degrees);

struct EmpiricalDist {
  std::map<Degree, double> probs;
  double mean = 0.0;
  /// sum i^2 p_i
  double second_moment = 0.0;
  /// sum i(i-1) p_i
  double factorial_moment = 0.0;
};

EmpiricalDist empirical(const DegreeSequence& s);
/// Same quantities for any nonempty degree list (a single tree, say).
EmpiricalDist empirical(std::span<const Degree> degrees);

struct TruncatedMoments {
  double mu_plus = 0.0;
  double sigma_plus_sq = 0.0;
  double sigma_minus_sq = 0.0;
};

/// Moments of the step law split at degree t: large steps (degree > t) and
/// the variance of the truncated small steps.
TruncatedMoments truncated_moments(const DegreeSequence& s, Degree t);

/// sqrt(sum i(i-1) s_i / n), the Brownian scale of the coding walk.
double limit_sigma(const DegreeSequence& s);

/// Target offspring law used to generate degree sequences for experiments.
/// Parsed from "geometric:q", "poisson:lambda" or "weights:p0,p1,...".
class OffspringLaw {
 public:
  static OffspringLaw parse(std::string_view text);
  static OffspringLaw geometric(double q);
  static OffspringLaw poisson(double lambda);
  static OffspringLaw weights(std::vector<double> p);

  /// p_i; zero outside the support.
  double prob(Degree i) const;
  /// Mass of {i, i+1, ...}.
  double tail(Degree i) const;
  double mean() const;
  const std::string& label() const { return label_; }

 private:
  enum class Kind { Geometric, Poisson, Weights };
  Kind kind_ = Kind::Weights;
  double param_ = 0.0;
  std::vector<double> weights_;
  std::string label_;
};

/// Rounds n p_i, restores the total n on the degree-1 count, then moves c(s)
/// to c_target one unit at a time: a 1 -> 0 (or, with no degree-1 nodes, the
/// smallest j -> j-1) conversion raises c by one, a 0 -> 1 conversion lowers it.
/// Consumes no randomness; `seed` is accepted for interface stability.
/// Throws Error{Infeasible} if more than n conversions would be needed.
DegreeSequence make_degree_sequence(const OffspringLaw& p, Count n, Count c_target,
                                    std::uint64_t seed);

void to_json(nlohmann::json& j, const DegreeSequence& s);
DegreeSequence degree_sequence_from_json(const nlohmann::json& j);

}  // namespace pforest
