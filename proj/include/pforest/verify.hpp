#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforest/degseq.hpp"
#include "pforest/rng.hpp"

namespace pforest {

struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=".
  std::string relation = "<=";
  bool passed = false;
};

Criterion criterion_le(std::string name, double value, double threshold);
Criterion criterion_ge(std::string name, double value, double threshold);

struct ExperimentReport {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json statistics = nlohmann::json::object();
  std::vector<Criterion> criteria;
  /// Set when the statistic is trivially constant (a single tree, say) and the
  /// distributional checks were skipped.
  bool degenerate = false;
  /// Raw per-replicate statistics.
  std::vector<std::string> raw_header;
  std::vector<std::vector<double>> raw_rows;

  bool passed() const;
  const Criterion* find(const std::string& name) const;
};

void to_json(nlohmann::json& j, const Criterion& c);
void to_json(nlohmann::json& j, const ExperimentReport& r);
void write_raw_csv(std::ostream& out, const ExperimentReport& r);

struct ExperimentConfig {
  std::string law = "geometric:0.5";
  Count n = 200000;
  /// Number of trees; when unset it is floor(n^cn_exponent).
  std::optional<Count> cn;
  double cn_exponent = 0.35;
  std::size_t reps = 300;
  std::uint64_t seed = 1;
  /// Worker threads; results never depend on it.
  unsigned threads = 1;
  bool keep_raw = false;
  /// Use this sequence instead of building one from (law, n, cn).
  std::optional<DegreeSequence> sequence;

  Count trees() const;
};

/// floor(n^exponent), guarded against floating-point undershoot.
Count cn_from_exponent(Count n, double exponent);

/// Runs body(r) for r in [0, count) over `threads` workers. Each call must
/// write only to slot r of its outputs, which makes the result independent of
/// scheduling. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Stream for replicate r of a given purpose under a master seed.
SeededRng replicate_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t r);

/// (n - |T_1|)/cn^2 and tau_n/cn^2 against the hitting-time law.
ExperimentReport experiment_tau(const ExperimentConfig& cfg);

struct TreeSizesOptions {
  std::size_t top_j = 1;
  std::size_t limit_reps = 3000;
  double dt = 1e-4;
  double t_cap = 200.0;
};

/// Ranked small-tree sizes |T_{i+1}|/cn^2 against simulated ranked excursion lengths.
ExperimentReport experiment_tree_sizes(const ExperimentConfig& cfg, const TreeSizesOptions& options = {});

/// S_{floor(t cn^2)}/cn against Normal(0, sigma^2 t).
ExperimentReport experiment_walk(const ExperimentConfig& cfg, const std::vector<double>& t_points = {0.5, 1.0, 2.0});

struct DegreesOptions {
  std::vector<Degree> degrees = {0, 1, 2};
  std::vector<std::size_t> trees = {1, 2};
  double delta = 0.01;
  double level = 0.99;
};

/// |p^i_{n,l} - p^i_n| and |sigma^2(p_{n,l}) - sigma^2(p_n)| for the l-th largest trees.
ExperimentReport experiment_degrees(const ExperimentConfig& cfg, const DegreesOptions& options = {});

/// experiment_degrees at each n in `ns` (increasing), with criteria that every
/// quantile decreases from the first to the last n.
ExperimentReport experiment_degrees_trend(const ExperimentConfig& cfg, const std::vector<Count>& ns,
                                          const DegreesOptions& options = {});

/// Frequency of the event that the marked tree is the largest one.
ExperimentReport experiment_largest_marked(const ExperimentConfig& cfg);

/// Exceedance frequency of sup_{x > cn} |p^i - Q^i(x)/x| >= t over shuffled degree vectors.
ExperimentReport experiment_concentration(const ExperimentConfig& cfg, Degree degree,
                                          const std::vector<double>& thresholds);

struct DtHalvingOptions {
  double sigma = 1.0;
  double dt = 1e-4;
  double t_cap = 50.0;
  std::size_t reps = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Sup distance between top-1 excursion-length CDFs at dt and dt/2, the coarse
/// path being the fine one observed at every other grid point.
ExperimentReport experiment_dt_halving(const DtHalvingOptions& options);

/// Exact hitting-time sampler against the closed-form CDF.
ExperimentReport experiment_tau_exact(double sigma, std::size_t count, std::uint64_t seed);

}  // namespace pforest
