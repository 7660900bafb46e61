#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pforest/forest_codec.hpp"

namespace pforest {

/// Nonnegative piecewise-linear function on a grid 0 = t_0 < ... < t_m with g(0) = 0.
class CodingFunction {
 public:
  CodingFunction(std::vector<double> times, std::vector<double> values);
  /// Grid 0, 1, ..., m.
  static CodingFunction on_unit_grid(std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  double support_end() const { return times_.back(); }

  /// Linear interpolation; Error{DomainError} outside [0, support_end()].
  double operator()(double t) const;
  /// Exact minimum of the interpolant over [min(s,t), max(s,t)].
  double min_between(double s, double t) const;

 private:
  std::size_t segment(double t) const;

  std::vector<double> times_;
  std::vector<double> values_;
};

/// Distance matrix with optional point masses (empty vector when absent).
/// The constructor checks symmetry, zero diagonal and nonnegativity within
/// 1e-9; the triangle inequality is left to is_metric (cubic cost).
class FiniteMetricSpace {
 public:
  explicit FiniteMetricSpace(Eigen::MatrixXd distances, Eigen::VectorXd masses = {});

  Eigen::Index size() const { return distances_.rows(); }
  const Eigen::MatrixXd& distances() const { return distances_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return distances_(i, j); }
  bool has_masses() const { return masses_.size() > 0; }
  const Eigen::VectorXd& masses() const { return masses_; }
  /// Masses if present, otherwise uniform probability weights.
  Eigen::VectorXd masses_or_uniform() const;

 private:
  Eigen::MatrixXd distances_;
  Eigen::VectorXd masses_;
};

/// g(s) + g(t) - 2 min_{[s∧t, s∨t]} g
double coding_pseudometric(const CodingFunction& g, double s, double t);

/// Pseudometric d°_g on the sample times, quotiented by zero distance. Each
/// time carries mass 1/k; identified times pool their mass. When `classes` is
/// given it receives the point index of every sample time.
FiniteMetricSpace metric_snapshot(const CodingFunction& g, std::span<const double> times,
                                  std::vector<std::size_t>* classes = nullptr);

FiniteMetricSpace tree_graph_metric(const PlaneTree& t, double scale, double mass_per_node);

/// Height profile of the contour (depth-first, edge by edge) exploration:
/// 2(|T|-1)+1 values on the unit grid.
CodingFunction contour_function(const PlaneTree& t);
/// Contour time at which each node (lex order) is first reached.
std::vector<double> first_visit_times(const PlaneTree& t);

bool is_pseudometric(const FiniteMetricSpace& x, double tol = 1e-9);
/// d(w,x) + d(y,z) <= max(d(w,y) + d(x,z), d(w,z) + d(x,y)) + tol on all quadruples.
bool four_point_condition(const FiniteMetricSpace& x, double tol = 1e-9);

inline constexpr Eigen::Index kBruteForceCap = 7;

/// Exact Gromov-Hausdorff distance: half the least distortion over all
/// correspondences. Error{TooLarge} beyond kBruteForceCap points.
double gh_distance_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

struct GhpBounds {
  double gh = 0.0;
  /// gh + |total mass difference|.
  double lower = 0.0;
  /// Best Hausdorff + Prokhorov value over the explicit embeddings tried.
  double upper = 0.0;
  double gap() const { return upper - lower; }
};

/// Bounds on the GHP distance. The upper bound glues the spaces along a
/// correspondence R at half its distortion level and evaluates the Prokhorov
/// distance exactly in the glued space; up to 64 distortion levels are tried.
/// Spaces without masses get uniform ones.
GhpBounds ghp_distance_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

/// 2 sup |f - g| after rescaling both time axes to [0, 1].
double gh_upper_bound_from_codings(const CodingFunction& f, const CodingFunction& g);

void write_csv(std::ostream& os, const CodingFunction& g);
void to_json(nlohmann::json& j, const FiniteMetricSpace& x);

}  // namespace pforest
