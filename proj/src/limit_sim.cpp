#include "pforest/limit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pforest/error.hpp"

namespace pforest {

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidArgument, std::string(what) + " must be positive");
}

std::vector<ExcursionInterval> rank(std::vector<ExcursionInterval> v) {
  std::stable_sort(v.begin(), v.end(), [](const ExcursionInterval& a, const ExcursionInterval& b) {
    return a.length() > b.length();
  });
  return v;
}

}  // namespace

std::vector<ExcursionInterval> ExcursionTracker::ranked() const { return rank(intervals_); }

HitResult simulate_to_hit(double x, double dt, SeededRng& rng, double t_cap) {
  check_positive(x, "level");
  check_positive(dt, "dt");
  const double step = std::sqrt(dt);
  HitResult out;
  out.path.dt = dt;
  out.path.values.push_back(0.0);
  double b = 0.0;
  std::size_t k = 0;
  while (true) {
    if (dt * static_cast<double>(k + 1) > t_cap) {
      throw Error(Errc::CapExceeded, "level not reached before t_cap");
    }
    const double prev = b;
    b += step * rng.normal();
    ++k;
    out.path.values.push_back(b);
    if (b <= -x) {
      out.tau = dt * (static_cast<double>(k - 1) + (prev + x) / (prev - b));
      return out;
    }
  }
}

BrownianPath reflect_at_min(const BrownianPath& path) {
  BrownianPath r = path;
  double running = 0.0;
  for (double& v : r.values) {
    running = std::min(running, v);
    v -= running;
  }
  return r;
}

std::vector<ExcursionInterval> ranked_excursions(const BrownianPath& path, double x) {
  ExcursionTracker tracker(x, path.dt);
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    if (tracker.feed(path.values[i])) return tracker.ranked();
  }
  throw Error(Errc::InvalidArgument, "path does not reach the level");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double tau_cdf(double t, double sigma) {
  check_positive(sigma, "sigma");
  if (!(t > 0.0)) throw Error(Errc::DomainError, "tau_cdf needs t > 0");
  if (std::isinf(t)) return 1.0;
  // 2 (1 - Phi(z)) = erfc(z / sqrt 2), without cancellation.
  return std::erfc(1.0 / (sigma * std::sqrt(t)) / std::numbers::sqrt2);
}

double tau_density(double t, double sigma) {
  check_positive(sigma, "sigma");
  if (!(t > 0.0)) throw Error(Errc::DomainError, "tau_density needs t > 0");
  // log form keeps tiny t from producing 0/0
  const double log_density = -1.0 / (2.0 * t * sigma * sigma) - 1.5 * std::log(t) -
                             std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  return std::exp(log_density);
}

double sample_tau_exact(double sigma, SeededRng& rng) {
  check_positive(sigma, "sigma");
  double z;
  do {
    z = rng.normal();
  } while (z == 0.0);
  return 1.0 / (sigma * sigma * z * z);
}

LimitReplicate sample_limit_vector(double sigma, SeededRng& rng, const LimitOptions& options) {
  check_positive(sigma, "sigma");
  check_positive(options.dt, "dt");
  const double x = 1.0 / sigma;
  const double step = std::sqrt(options.dt);
  const auto max_steps = static_cast<std::size_t>(std::floor(options.t_cap / options.dt));

  ExcursionTracker tracker(x, options.dt);
  std::vector<double> path;
  if (options.keep_paths) path.push_back(0.0);
  double b = 0.0;
  while (!tracker.done() && tracker.steps() < max_steps) {
    b += step * rng.normal();
    if (options.keep_paths) path.push_back(b);
    tracker.feed(b);
  }

  LimitReplicate out;
  if (!tracker.done()) {
    if (options.on_cap == CapPolicy::Throw) throw Error(Errc::CapExceeded, "level not reached before t_cap");
    tracker.censor();
    out.censored = true;
    out.tau = tracker.time();
  } else {
    out.tau = tracker.tau();
  }
  const auto ranked = tracker.ranked();
  const std::size_t keep = std::min(options.top_j, ranked.size());
  out.intervals.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep));
  for (const auto& iv : out.intervals) out.lengths.push_back(iv.length());

  if (options.keep_paths) {
    double running = 0.0;
    std::vector<double> reflected(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
      running = std::min(running, path[i]);
      reflected[i] = path[i] - running;
    }
    for (const auto& iv : out.intervals) {
      const auto first = static_cast<std::size_t>(std::llround(iv.g / options.dt));
      const auto last = std::min(reflected.size() - 1, static_cast<std::size_t>(std::ceil(iv.d / options.dt - 1e-9)));
      BrownianPath e;
      e.dt = options.dt;
      e.sigma_scale = sigma;
      e.values.assign(reflected.begin() + static_cast<std::ptrdiff_t>(first),
                      reflected.begin() + static_cast<std::ptrdiff_t>(last) + 1);
      out.excursions.push_back(std::move(e));
    }
  }
  return out;
}

CodingFunction coding_from_excursion(const BrownianPath& excursion) {
  std::vector<double> times(excursion.values.size());
  std::vector<double> values(excursion.values.size());
  const double base = excursion.values.empty() ? 0.0 : excursion.values.front();
  for (std::size_t i = 0; i < values.size(); ++i) {
    times[i] = excursion.dt * static_cast<double>(i);
    values[i] = std::max(0.0, 2.0 * (excursion.values[i] - base));
  }
  return CodingFunction(std::move(times), std::move(values));
}

void to_json(nlohmann::json& j, const LimitReplicate& r) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : r.intervals) intervals.push_back({iv.g, iv.d});
  j = nlohmann::json{{"tau", r.tau}, {"censored", r.censored}, {"lengths", r.lengths}, {"intervals", intervals}};
}

}  // namespace pforest
