#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "pforest/realtree_metrics.hpp"
#include "pforest/rng.hpp"

namespace pforest {

/// Brownian motion sampled on the grid k * dt (Gaussian increments of variance dt).
struct BrownianPath {
  double dt = 0.0;
  /// Level scale the path was simulated for (informational).
  double sigma_scale = 1.0;
  std::vector<double> values;

  double duration() const { return dt * static_cast<double>(values.size() - 1); }
};

struct ExcursionInterval {
  double g = 0.0;
  double d = 0.0;
  double length() const { return d - g; }
};

struct HitResult {
  BrownianPath path;
  double tau = 0.0;
};

/// Runs B until the first grid point with B <= -x; tau is interpolated on the
/// crossing step. Error{CapExceeded} if the grid passes t_cap first.
HitResult simulate_to_hit(double x, double dt, SeededRng& rng, double t_cap);

/// R = B - running minimum.
BrownianPath reflect_at_min(const BrownianPath& path);

/// Excursions of R above zero within [0, tau(x)], longest first (ties by
/// earlier start). On the grid R vanishes exactly at new running minima.
/// Error{InvalidArgument} if the path never reaches -x.
std::vector<ExcursionInterval> ranked_excursions(const BrownianPath& path, double x);

/// Streaming version of the excursion scan: feed grid values B(1), B(2), ...
/// (B(0) = 0 is implied) until done().
class ExcursionTracker {
 public:
  ExcursionTracker(double x, double dt) : x_(x), dt_(dt) {}

  /// Returns true once B has reached -x.
  bool feed(double b) {
    ++step_;
    if (b <= -x_) {
      tau_ = dt_ * (static_cast<double>(step_ - 1) + (prev_ + x_) / (prev_ - b));
      close_gap(tau_);
      done_ = true;
    } else if (b <= min_) {
      close_gap(dt_ * static_cast<double>(step_));
      last_zero_ = step_;
      min_ = b;
    }
    prev_ = b;
    return done_;
  }

  /// Closes the excursion in progress at the current step (for censored runs).
  void censor() {
    if (!done_) close_gap(dt_ * static_cast<double>(step_));
  }

  bool done() const { return done_; }
  double tau() const { return tau_; }
  std::size_t steps() const { return step_; }
  double time() const { return dt_ * static_cast<double>(step_); }
  const std::vector<ExcursionInterval>& intervals() const { return intervals_; }
  /// Intervals sorted longest first, ties by start.
  std::vector<ExcursionInterval> ranked() const;

 private:
  void close_gap(double end) {
    if (step_ - last_zero_ > 1) intervals_.push_back({dt_ * static_cast<double>(last_zero_), end});
  }

  double x_;
  double dt_;
  std::size_t step_ = 0;
  std::size_t last_zero_ = 0;
  double min_ = 0.0;
  double prev_ = 0.0;
  double tau_ = 0.0;
  bool done_ = false;
  std::vector<ExcursionInterval> intervals_;
};

/// Standard normal CDF through std::erfc (absolute error far below 1e-7).
double normal_cdf(double z);

/// P(tau(1/sigma) <= t) = 2 (1 - Phi(1 / (sigma sqrt t))). Error{DomainError} for t <= 0.
double tau_cdf(double t, double sigma);
/// exp(-1 / (2 t sigma^2)) / (sigma sqrt(2 pi t^3)). Error{DomainError} for t <= 0.
double tau_density(double t, double sigma);

/// Exact draw of tau(1/sigma) as (1/sigma)^2 / Z^2.
double sample_tau_exact(double sigma, SeededRng& rng);

enum class CapPolicy { Throw, Censor };

struct LimitOptions {
  std::size_t top_j = 1;
  double dt = 1e-4;
  double t_cap = 200.0;
  CapPolicy on_cap = CapPolicy::Throw;
  /// Keep the excursion sub-paths (needs the whole path in memory).
  bool keep_paths = false;
};

struct LimitReplicate {
  /// tau(1/sigma); equals the cap time when censored.
  double tau = 0.0;
  /// The cap was reached first. Lengths are then lower bounds.
  bool censored = false;
  /// Top j ranked excursion lengths (fewer if there are fewer excursions).
  std::vector<double> lengths;
  std::vector<ExcursionInterval> intervals;
  /// R on each of the top intervals, shifted to start at time 0.
  std::vector<BrownianPath> excursions;
};

/// One draw of (tau(1/sigma), ranked excursion lengths) from a discretized path.
LimitReplicate sample_limit_vector(double sigma, SeededRng& rng, const LimitOptions& options);

/// Coding function 2 * e for an excursion sub-path e.
CodingFunction coding_from_excursion(const BrownianPath& excursion);

void to_json(nlohmann::json& j, const LimitReplicate& r);

}  // namespace pforest
