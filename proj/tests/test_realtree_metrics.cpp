#include "doctest.h"

#include <sstream>

#include "oracle.hpp"
#include "pforest/error.hpp"
#include "pforest/realtree_metrics.hpp"
#include "pforest/rng.hpp"

using namespace pforest;

namespace {

FiniteMetricSpace space(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return FiniteMetricSpace(m);
}

CodingFunction tent() { return CodingFunction::on_unit_grid({0, 1, 2, 1, 0}); }

FiniteMetricSpace random_space(SeededRng& rng, Eigen::Index n) {
  // Snapshot of a random walk excursion-like coding function.
  std::vector<double> v{0.0};
  for (int i = 0; i < 12; ++i) v.push_back(std::max(0.0, v.back() + rng.normal()));
  const auto g = CodingFunction::on_unit_grid(v);
  std::vector<double> times;
  for (Eigen::Index i = 0; i < n; ++i) times.push_back(12.0 * rng.uniform());
  const auto x = metric_snapshot(g, times);
  return FiniteMetricSpace(x.distances());
}

}  // namespace

TEST_CASE("coding function validation") {
  CHECK_THROWS_AS(CodingFunction({0, 1}, {1, 0}), Error);
  CHECK_THROWS_AS(CodingFunction({0, 0}, {0, 1}), Error);
  CHECK_THROWS_AS(CodingFunction({0, 1}, {0, -1}), Error);
  CHECK_THROWS_AS(tent()(5.0), Error);
  CHECK(tent()(1.5) == doctest::Approx(1.5));
  CHECK(tent().min_between(0.5, 3.5) == doctest::Approx(0.5));
}

TEST_CASE("coding pseudometric") {
  const auto g = tent();
  CHECK(coding_pseudometric(g, 1, 3) == 0.0);
  CHECK(coding_pseudometric(g, 0, 2) == 2.0);
  for (double s : {0.0, 0.3, 1.7, 4.0}) CHECK(coding_pseudometric(g, s, s) == 0.0);
}

TEST_CASE("metric snapshot quotients zero distances") {
  const std::vector<double> times{0, 1, 2, 3, 4};
  std::vector<std::size_t> classes;
  const auto x = metric_snapshot(tent(), times, &classes);
  // d(0,4) = 0 as well as d(1,3) = 0
  CHECK(x.size() == 3);
  CHECK(classes == std::vector<std::size_t>{0, 1, 2, 1, 0});
  CHECK(x.masses()(0) == doctest::Approx(0.4));
  CHECK(x.masses()(2) == doctest::Approx(0.2));
  const auto zero = CodingFunction::on_unit_grid({0, 0, 0});
  CHECK(metric_snapshot(zero, std::vector<double>{0, 1, 2}).size() == 1);
}

TEST_CASE("tree graph metric") {
  CHECK(tree_graph_metric(PlaneTree::leaf(), 1.0, 1.0).size() == 1);
  const auto cherry = tree_graph_metric(PlaneTree({2, 0, 0}), 1.0, 1.0 / 3);
  CHECK(cherry(0, 1) == 1.0);
  CHECK(cherry(1, 2) == 2.0);
  const auto path = tree_graph_metric(PlaneTree({1, 1, 1, 0}), 0.5, 0.25);
  CHECK(path.distances().maxCoeff() == 1.5);
}

TEST_CASE("contour function") {
  CHECK(contour_function(PlaneTree::leaf()).values() == std::vector<double>{0});
  CHECK(contour_function(PlaneTree({2, 0, 0})).values() == std::vector<double>{0, 1, 0, 1, 0});
  CHECK(contour_function(PlaneTree({1, 1, 1, 0})).values() == std::vector<double>{0, 1, 2, 3, 2, 1, 0});
}

TEST_CASE("contour snapshot reproduces the graph metric for all trees up to 8 nodes") {
  oracle::Enumerator e;
  std::size_t count = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (const auto& t : e.trees(n)) {
      const PlaneTree pt(oracle::preorder(t));
      const auto times = first_visit_times(pt);
      const auto snap = metric_snapshot(contour_function(pt), times);
      const auto graph = tree_graph_metric(pt, 1.0, 1.0 / static_cast<double>(n));
      REQUIRE(snap.size() == static_cast<Eigen::Index>(n));
      CHECK((snap.distances().array() == graph.distances().array()).all());
      const auto d = oracle::distances(t);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) CHECK(graph(i, j) == d[i][j]);
      }
      CHECK(four_point_condition(graph));
      CHECK(is_pseudometric(graph));
      ++count;
    }
  }
  CHECK(count == 1 + 1 + 2 + 5 + 14 + 42 + 132 + 429);
}

TEST_CASE("metric checks detect violations") {
  CHECK_FALSE(is_pseudometric(space({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}})));
  // four-cycle with unit edges is not a tree metric
  CHECK_FALSE(four_point_condition(space({{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}})));
  CHECK_THROWS_AS(space({{0, 1}, {2, 0}}), Error);
}

TEST_CASE("gh distance") {
  const auto one = space({{0}});
  const auto two = space({{0, 2}, {2, 0}});
  CHECK(gh_distance_bruteforce(one, one) == 0.0);
  CHECK(gh_distance_bruteforce(one, two) == doctest::Approx(1.0));
  // the cherry and the two-edge path are the same metric space
  const auto cherry = tree_graph_metric(PlaneTree({2, 0, 0}), 1.0, 1.0 / 3);
  const auto path = tree_graph_metric(PlaneTree({1, 1, 0}), 1.0, 1.0 / 3);
  CHECK(gh_distance_bruteforce(cherry, path) == 0.0);
  const auto star = tree_graph_metric(PlaneTree({3, 0, 0, 0}), 1.0, 0.25);
  const auto line = tree_graph_metric(PlaneTree({1, 1, 1, 0}), 1.0, 0.25);
  CHECK(gh_distance_bruteforce(star, line) == doctest::Approx(0.5));
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(8, 8);
  CHECK_THROWS_AS(gh_distance_bruteforce(FiniteMetricSpace(big), one), Error);
}

TEST_CASE("gh distance is a metric on small random spaces") {
  SeededRng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_space(rng, 2 + static_cast<Eigen::Index>(rng.below(4)));
    const auto b = random_space(rng, 2 + static_cast<Eigen::Index>(rng.below(4)));
    const auto c = random_space(rng, 2 + static_cast<Eigen::Index>(rng.below(4)));
    const double ab = gh_distance_bruteforce(a, b);
    CHECK(ab == doctest::Approx(gh_distance_bruteforce(b, a)));
    CHECK(ab <= gh_distance_bruteforce(a, c) + gh_distance_bruteforce(c, b) + 1e-9);
    CHECK(gh_distance_bruteforce(a, a) == 0.0);
  }
}

TEST_CASE("zero gh distance exactly for isometric spaces") {
  // Relabelled copies are at distance 0; a perturbed copy is not.
  SeededRng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_space(rng, 5);
    const auto n = a.size();
    Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
    p.setIdentity();
    for (Eigen::Index i = n - 1; i > 0; --i) std::swap(p.indices()[i], p.indices()[static_cast<Eigen::Index>(rng.below(i + 1))]);
    const FiniteMetricSpace b(p * a.distances() * p.transpose());
    CHECK(gh_distance_bruteforce(a, b) == 0.0);
    if (a.distances().maxCoeff() > 0) {
      Eigen::MatrixXd d = a.distances();
      d *= 1.5;
      CHECK(gh_distance_bruteforce(a, FiniteMetricSpace(d)) > 0.0);
    }
  }
}

TEST_CASE("ghp bounds") {
  const auto one = space({{0}});
  const auto r = ghp_distance_bruteforce(one, one);
  CHECK(r.upper == 0.0);
  CHECK(r.lower == 0.0);
  const auto two = space({{0, 2}, {2, 0}});
  const auto b = ghp_distance_bruteforce(one, two);
  CHECK(b.gh == doctest::Approx(1.0));
  CHECK(b.lower <= b.upper + 1e-12);
  SeededRng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_space(rng, 4);
    const auto y = random_space(rng, 3);
    const auto g = ghp_distance_bruteforce(x, y);
    CHECK(g.lower <= g.upper + 1e-12);
    CHECK(g.gap() >= -1e-12);
  }
}

TEST_CASE("gh upper bound from codings") {
  const auto f = tent();
  CHECK(gh_upper_bound_from_codings(f, f) == 0.0);
  const auto g = CodingFunction::on_unit_grid({0, 1.5, 0});
  const auto h = CodingFunction::on_unit_grid({0, 1, 0});
  CHECK(gh_upper_bound_from_codings(g, h) == doctest::Approx(1.0));
  SeededRng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a{0}, b{0};
    for (int i = 0; i < 6; ++i) {
      a.push_back(std::abs(a.back() + rng.normal()));
      b.push_back(std::abs(b.back() + rng.normal()));
    }
    a.push_back(0);
    b.push_back(0);
    const auto fa = CodingFunction::on_unit_grid(a);
    const auto fb = CodingFunction::on_unit_grid(b);
    std::vector<double> ta, tb;
    for (int i = 0; i < 5; ++i) {
      const double u = rng.uniform();
      ta.push_back(7.0 * u);
      tb.push_back(7.0 * u);
    }
    const auto xa = metric_snapshot(fa, ta);
    const auto xb = metric_snapshot(fb, tb);
    CHECK(gh_upper_bound_from_codings(fa, fb) >= gh_distance_bruteforce(xa, xb) - 1e-9);
  }
}

TEST_CASE("serialization") {
  std::ostringstream os;
  write_csv(os, CodingFunction::on_unit_grid({0, 1, 0}));
  CHECK(os.str() == "t,g\n0,0\n1,1\n2,0\n");
  nlohmann::json j;
  to_json(j, space({{0, 1}, {1, 0}}));
  CHECK(j["distances"][0][1] == 1.0);
}
