#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "pforest/error.hpp"
#include "pforest/limit_sim.hpp"
#include "pforest/stats.hpp"

using namespace pforest;

namespace {

BrownianPath path(std::vector<double> v, double dt = 1.0) {
  BrownianPath p;
  p.dt = dt;
  p.values = std::move(v);
  return p;
}

// Integral of the closed-form density over (0, t].
double integrated_density(double t, double sigma) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([sigma](double s) { return s > 0.0 ? tau_density(s, sigma) : 0.0; }, 0.0, t);
}

}  // namespace

TEST_CASE("simulate_to_hit stops at the first crossing") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SeededRng rng(seed);
    const auto h = simulate_to_hit(1.0, 1e-3, rng, 1e4);
    const auto& v = h.path.values;
    CHECK(v.back() <= -1.0);
    CHECK(std::all_of(v.begin(), v.end() - 1, [](double b) { return b > -1.0; }));
    CHECK(h.tau <= h.path.duration());
    CHECK(h.tau > h.path.duration() - 1e-3);
  }
  SeededRng rng(1);
  CHECK_THROWS_AS(simulate_to_hit(100.0, 1e-2, rng, 1.0), Error);
}

TEST_CASE("mean of the capped hitting time grows with the cap") {
  double prev = 0.0;
  for (double cap : {1.0, 10.0, 100.0}) {
    double total = 0.0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      SeededRng rng = SeededRng::substream(3, r);
      try {
        total += simulate_to_hit(1.0, 1e-2, rng, cap).tau;
      } catch (const Error&) {
        total += cap;
      }
    }
    CHECK(total / 1000 > prev);
    prev = total / 1000;
  }
}

TEST_CASE("hitting probability by time one") {
  std::size_t hits = 0;
  const std::size_t reps = 10000;
  for (std::uint64_t r = 0; r < reps; ++r) {
    SeededRng rng = SeededRng::substream(17, r);
    LimitOptions opt;
    opt.t_cap = 1.0;
    opt.on_cap = CapPolicy::Censor;
    if (!sample_limit_vector(1.0, rng, opt).censored) ++hits;
  }
  CHECK(static_cast<double>(hits) / reps == doctest::Approx(integrated_density(1.0, 1.0)).epsilon(0.02 / 0.3173));
}

TEST_CASE("reflection") {
  CHECK(reflect_at_min(path({0, -1, -2, -3})).values == std::vector<double>{0, 0, 0, 0});
  CHECK(reflect_at_min(path({0, 1, 2, 3})).values == std::vector<double>{0, 1, 2, 3});
  CHECK(reflect_at_min(path({0, 1, -1, 0})).values == std::vector<double>{0, 1, 0, 1});
}

TEST_CASE("ranked excursions") {
  CHECK(ranked_excursions(path({0, -1, -2, -3}), 3).empty());
  auto e = ranked_excursions(path({0, 1, 2, 1, 0, -1, -2, -3}), 2.5);
  REQUIRE(e.size() == 1);
  CHECK(e[0].g == 0.0);
  CHECK(e[0].d == 4.0);
  // ties: equal lengths keep the earlier one first
  e = ranked_excursions(path({0, 1, -1, 0, -2, -3}), 3);
  REQUIRE(e.size() == 2);
  CHECK(e[0].g == 0.0);
  CHECK(e[1].g == 2.0);
  // the interval open at tau is clipped there
  e = ranked_excursions(path({0, -1, 0, -3}), 2);
  REQUIRE(e.size() == 1);
  CHECK(e[0].g == 1.0);
  CHECK(e[0].d == doctest::Approx(2.0 + 2.0 / 3));
  CHECK_THROWS_AS(ranked_excursions(path({0, 1, 0}), 1), Error);
}

TEST_CASE("excursions partition [0, tau] up to grid steps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SeededRng rng(seed);
    const double dt = 1e-3;
    const auto h = simulate_to_hit(0.5, dt, rng, 1e4);
    const auto ex = ranked_excursions(h.path, 0.5);
    double total = 0.0;
    for (const auto& iv : ex) total += iv.length();
    // zero-set measure at grid scale: one step per new minimum not inside an excursion
    const auto r = reflect_at_min(h.path);
    std::size_t lone = 0;
    for (std::size_t i = 1; i + 1 < r.values.size(); ++i) {
      if (r.values[i] == 0.0 && r.values[i + 1] == 0.0) ++lone;
    }
    CHECK(total <= h.tau + 1e-12);
    CHECK(std::abs(total + dt * static_cast<double>(lone) - h.tau) <= dt + 1e-12);
    for (std::size_t i = 1; i < ex.size(); ++i) CHECK(ex[i - 1].length() >= ex[i].length());
    auto sorted = ex;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.g < b.g; });
    for (std::size_t i = 1; i < sorted.size(); ++i) CHECK(sorted[i - 1].d <= sorted[i].g);
  }
}

TEST_CASE("tau law") {
  CHECK(tau_cdf(1.0, 1.0) == doctest::Approx(0.31731).epsilon(1e-4));
  CHECK(tau_cdf(1.0, 1.0) == doctest::Approx(integrated_density(1.0, 1.0)).epsilon(1e-9));
  CHECK(tau_cdf(1e12, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(tau_cdf(0.0, 1.0), Error);
  CHECK_THROWS_AS(tau_density(-1.0, 1.0), Error);
  for (double sigma : {0.5, 1.0, std::sqrt(2.0), 3.0}) {
    for (double t : {0.1, 0.7, 3.0, 40.0}) {
      CHECK(tau_cdf(t, sigma) == doctest::Approx(integrated_density(t, sigma)).epsilon(1e-8));
    }
  }
}

TEST_CASE("density integrates to one") {
  for (double sigma : {1.0, std::sqrt(2.0)}) {
    boost::math::quadrature::tanh_sinh<double> q;
    const double total = q.integrate([sigma](double t) { return t > 0.0 ? tau_density(t, sigma) : 0.0; }, 0.0,
                                     std::numeric_limits<double>::infinity());
    CHECK(std::abs(total - 1.0) <= 1e-6);
  }
}

TEST_CASE("normal cdf accuracy") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(std::abs(normal_cdf(-3.0) - 0.0013498980316301) < 1e-7);
}

TEST_CASE("exact tau sampler") {
  SeededRng rng(99);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_tau_exact(1.0, rng);
  CHECK(ks_one_sample(x, [](double t) { return t > 0 ? tau_cdf(t, 1.0) : 0.0; }) <= 1.63 / std::sqrt(1e5));

  // sigma = 2 samples are sigma = 1 samples over 4 with the same stream
  SeededRng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(sample_tau_exact(2.0, a) == doctest::Approx(sample_tau_exact(1.0, b) / 4));

  // median solves Phi(1/(sigma sqrt t)) = 3/4
  const auto root = boost::math::tools::bisect([](double t) { return tau_cdf(t, 1.0) - 0.5; }, 0.01, 100.0,
                                               boost::math::tools::eps_tolerance<double>(40));
  const double median_t = 0.5 * (root.first + root.second);
  const double z75 = 0.6744897501960817;
  CHECK(median_t == doctest::Approx(1.0 / (z75 * z75)).epsilon(1e-9));
  CHECK(quantile(x, 0.5) == doctest::Approx(median_t).epsilon(0.03));
}

TEST_CASE("limit vector") {
  LimitOptions opt;
  opt.top_j = 5;
  opt.dt = 1e-3;
  opt.t_cap = 1e4;
  opt.keep_paths = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SeededRng rng(seed);
    const auto r = sample_limit_vector(1.0, rng, opt);
    CHECK_FALSE(r.censored);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.lengths.size(); ++i) {
      sum += r.lengths[i];
      if (i > 0) CHECK(r.lengths[i - 1] >= r.lengths[i]);
    }
    CHECK(sum <= r.tau + 1e-12);
    REQUIRE(r.excursions.size() == r.lengths.size());
    for (const auto& e : r.excursions) {
      CHECK(e.values.front() == 0.0);
      const auto g = coding_from_excursion(e);
      CHECK(g.values().front() == 0.0);
    }
  }
  SeededRng rng(1);
  opt.t_cap = 1e-2;
  CHECK_THROWS_AS(sample_limit_vector(0.01, rng, opt), Error);
}

TEST_CASE("tau marginal of the limit vector matches the exact sampler") {
  std::vector<double> grid_tau, exact;
  SeededRng e(3);
  LimitOptions opt;
  opt.t_cap = 50.0;
  opt.on_cap = CapPolicy::Censor;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    SeededRng rng = SeededRng::substream(4, r);
    grid_tau.push_back(sample_limit_vector(1.0, rng, opt).tau);
  }
  for (int i = 0; i < 200000; ++i) exact.push_back(std::min(50.0, sample_tau_exact(1.0, e)));
  CHECK(ks_two_sample(grid_tau, exact) <= 0.02);
}

TEST_CASE("top excursion length against the Poisson excursion law") {
  // Excursions of R before tau(x) form a Poisson process with length tail
  // x * sqrt(2/(pi l)), so P(L_1 <= l) = exp(-x sqrt(2/(pi l))).
  const double sigma = std::sqrt(2.0);
  const double x = 1.0 / sigma;
  // Censored replicates only give a lower bound, so they are allowed for in the tolerance.
  std::vector<double> top;
  LimitOptions opt;
  opt.dt = 1e-3;
  opt.t_cap = 2000.0;
  opt.on_cap = CapPolicy::Censor;
  std::size_t censored = 0;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    SeededRng rng = SeededRng::substream(6, r);
    const auto v = sample_limit_vector(sigma, rng, opt);
    if (v.censored) ++censored;
    top.push_back(v.lengths.empty() ? 0.0 : v.lengths.front());
  }
  const double pi = 3.141592653589793;
  const double ks = ks_one_sample(top, [&](double l) { return l > 0 ? std::exp(-x * std::sqrt(2.0 / (pi * l))) : 0.0; });
  CHECK(ks <= 1.63 / std::sqrt(2000.0) + static_cast<double>(censored) / 2000.0 + 0.01);
}
