#include "pforest/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "pforest/error.hpp"

namespace pforest {

namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw Error(Errc::EmptySample, "empty sample");
}

}  // namespace

double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require_nonempty(samples.size());
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size());
  require_nonempty(b.size());
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ChiSquare chi_square_uniform(std::span<const std::size_t> counts) {
  require_nonempty(counts.size());
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0.0) throw Error(Errc::EmptySample, "no observations");
  ChiSquare out;
  out.dof = counts.size() - 1;
  const double expected = total / static_cast<double>(counts.size());
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    out.stat += diff * diff / expected;
  }
  out.p_value = out.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.stat);
  return out;
}

double quantile(std::vector<double> samples, double q) {
  require_nonempty(samples.size());
  if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::InvalidArgument, "quantile level outside [0,1]");
  std::sort(samples.begin(), samples.end());
  const double h = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

double mean(std::span<const double> x) {
  require_nonempty(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::EmptySample, "variance needs two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::InvalidArgument, "correlation needs paired samples");
  if (x.size() < 2) throw Error(Errc::EmptySample, "correlation needs two samples");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double binomial_halfwidth(double p, std::size_t trials) {
  require_nonempty(trials);
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace pforest
