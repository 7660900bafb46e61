#include "doctest.h"

#include <sstream>

#include "pforest/error.hpp"
#include "pforest/verify.hpp"

using namespace pforest;

namespace {

ExperimentConfig small(std::size_t reps = 200) {
  ExperimentConfig c;
  c.n = 20000;
  c.reps = reps;
  c.seed = 3;
  return c;
}

std::string dump(const ExperimentReport& r) {
  nlohmann::json j;
  to_json(j, r);
  return j.dump();
}

}  // namespace

TEST_CASE("cn from exponent") {
  CHECK(cn_from_exponent(200000, 0.35) == 71);
  CHECK(cn_from_exponent(50000, 0.35) == 44);
  CHECK(cn_from_exponent(100000, 0.35) == 56);
  CHECK(cn_from_exponent(1, 0.35) == 1);
}

TEST_CASE("parallel_for is deterministic and propagates errors") {
  std::vector<int> out(1000);
  parallel_for(out.size(), 4, [&](std::size_t r) { out[r] = static_cast<int>(r * r % 97); });
  for (std::size_t r = 0; r < out.size(); ++r) CHECK(out[r] == static_cast<int>(r * r % 97));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t r) { if (r == 5) throw Error(Errc::DomainError, "x"); }), Error);
}

TEST_CASE("reports do not depend on the thread count") {
  auto a = small();
  auto b = small();
  b.threads = 3;
  CHECK(dump(experiment_tau(a)) == dump(experiment_tau(b)));
  CHECK(dump(experiment_walk(a)) == dump(experiment_walk(b)));
  CHECK(dump(experiment_largest_marked(a)) == dump(experiment_largest_marked(b)));
  CHECK(dump(experiment_tau(a)) == dump(experiment_tau(a)));
}

TEST_CASE("tau experiment") {
  const auto r = experiment_tau(small());
  CHECK(r.find("identity_violations")->passed);
  CHECK(r.statistics.contains("ks_rest"));
  auto one = small(20);
  one.cn = 1;
  const auto d = experiment_tau(one);
  CHECK(d.degenerate);
  auto big = small(20);
  big.cn = 1000;
  CHECK_THROWS_AS(experiment_tau(big), Error);
}

TEST_CASE("tree sizes experiment") {
  TreeSizesOptions opt;
  opt.top_j = 2;
  opt.limit_reps = 100;
  opt.dt = 1e-3;
  opt.t_cap = 20;
  const auto r = experiment_tree_sizes(small(), opt);
  CHECK(r.find("not_decreasing")->passed);
  CHECK(r.statistics["ks"].size() == 2);
}

TEST_CASE("walk experiment") {
  const auto r = experiment_walk(small(300), {0.0, 1.0, 2.0});
  CHECK(r.statistics["per_t"][0]["identically_zero"] == true);
  CHECK(r.statistics.contains("variance_ratio"));
  CHECK_THROWS_AS(experiment_walk(small(), {-1.0}), Error);
}

TEST_CASE("degrees experiment") {
  auto all_leaves = small(20);
  all_leaves.sequence = validate({{0, 50}});
  const auto z = experiment_degrees(all_leaves);
  for (const auto& q : z.statistics["quantities"]) CHECK(q["max"] == 0.0);
  const auto r = experiment_degrees(small());
  CHECK(r.statistics["quantities"].size() == 8);
  const auto t = experiment_degrees_trend(small(100), {5000, 20000});
  CHECK(t.statistics["runs"].size() == 2);
}

TEST_CASE("largest marked experiment") {
  auto one = small(30);
  one.cn = 1;
  const auto r = experiment_largest_marked(one);
  CHECK(r.statistics["frequency"] == 1.0);
}

TEST_CASE("concentration experiment") {
  auto c = small(50);
  const auto r = experiment_concentration(c, 0, {0.3, 0.5});
  CHECK(r.find("endpoint_violations")->passed);
  CHECK_THROWS_AS(experiment_concentration(c, 0, {1.0}), Error);
}

TEST_CASE("limit experiments") {
  DtHalvingOptions o;
  o.reps = 200;
  o.t_cap = 5;
  o.dt = 1e-3;
  const auto r = experiment_dt_halving(o);
  CHECK(r.statistics.contains("ks"));
  CHECK(experiment_tau_exact(1.0, 10000, 1).passed());
}

TEST_CASE("raw csv") {
  auto c = small(3);
  c.keep_raw = true;
  const auto r = experiment_largest_marked(c);
  std::ostringstream os;
  write_raw_csv(os, r);
  const auto text = os.str();
  CHECK(text.rfind("replicate,largest_is_marked,largest_size,marked_size\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
