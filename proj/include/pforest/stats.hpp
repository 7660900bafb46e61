#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pforest {

/// sup_x |F_N(x) - cdf(x)|. Error{EmptySample} on empty input.
double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquare {
  double stat = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

/// Pearson test of the counts against equal cell probabilities.
ChiSquare chi_square_uniform(std::span<const std::size_t> counts);

/// Empirical quantile (type 7, linear between order statistics), q in [0, 1].
double quantile(std::vector<double> samples, double q);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double correlation(std::span<const double> x, std::span<const double> y);

/// Half-width of the normal-approximation 95% interval for a proportion.
double binomial_halfwidth(double p, std::size_t trials);

}  // namespace pforest
