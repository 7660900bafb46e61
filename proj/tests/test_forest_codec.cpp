#include "doctest.h"

#include <set>

#include "oracle.hpp"
#include "pforest/error.hpp"
#include "pforest/forest_codec.hpp"

using namespace pforest;
using V = std::vector<Level>;
using D = std::vector<Degree>;

namespace {

PlaneTree tree(D lex) { return PlaneTree(std::move(lex)); }

PlaneForest to_forest(const oracle::Forest& f) {
  PlaneForest out;
  for (const auto& t : f) out.trees.emplace_back(oracle::preorder(t));
  return out;
}

DegreeSequence to_sequence(const oracle::Histogram& h) {
  std::map<Degree, Count> m(h.begin(), h.end());
  return validate(m);
}

}  // namespace

TEST_CASE("plane tree validation and views") {
  CHECK_THROWS_AS(tree({2, 0}), Error);
  CHECK_THROWS_AS(tree({0, 0}), Error);
  CHECK_THROWS_AS(tree({}), Error);
  const auto t = tree({2, 3, 0, 0, 0, 1, 0});
  CHECK(t.parents() == std::vector<std::size_t>{7, 0, 1, 1, 1, 0, 5});
  CHECK(t.depths() == std::vector<std::size_t>{0, 1, 2, 2, 2, 1, 2});
  CHECK(t.children()[1] == std::vector<std::size_t>{2, 3, 4});
}

TEST_CASE("lex degrees and depth-first walk") {
  const auto leaf = PlaneTree::leaf();
  CHECK(D(lex_degrees(leaf).begin(), lex_degrees(leaf).end()) == D{0});
  const auto t = tree({1, 1, 3, 0, 0, 0});
  CHECK(D(lex_degrees(t).begin(), lex_degrees(t).end()) == D{1, 1, 3, 0, 0, 0});
  CHECK(dfw_encode(PlaneTree::leaf()).data() == V{0, -1});
  CHECK(dfw_encode(tree({2, 0, 0})).data() == V{0, 1, 0, -1});
  CHECK(dfw_encode(tree({2, 3, 0, 0, 0, 1, 0})).data() == V{0, 1, 3, 2, 1, 0, 0, -1});
  for (const auto& lex : {D{0}, D{2, 0, 0}, D{2, 3, 0, 0, 0, 1, 0}, D{1, 1, 3, 0, 0, 0}}) {
    CHECK(dfw_decode(dfw_encode(tree(lex))) == tree(lex));
  }
  CHECK_THROWS_AS(dfw_decode(std::span<const Level>(V{0, -1, 0, -1})), Error);
}

TEST_CASE("marked tree codec") {
  auto m = marked_tree_from_bridge(LatticeBridge(V{0, -1, -1, -2, -1, 1, 0, -1}));
  CHECK(m.tree == tree({2, 3, 0, 0, 0, 1, 0}));
  CHECK(m.mark == 4);  // fifth node in lex order
  m = marked_tree_from_bridge(LatticeBridge(V{0, -1}));
  CHECK(m.tree == PlaneTree::leaf());
  CHECK(m.mark == 0);
  m = marked_tree_from_bridge(LatticeBridge(V{0, -1, -2, -3, -3, -3, -1}));
  CHECK(m.tree == tree({1, 1, 3, 0, 0, 0}));
  CHECK(m.mark == 3);
  for (const auto& b : {V{0, -1, -1, -2, -1, 1, 0, -1}, V{0, -1}, V{0, -1, -2, -3, -3, -3, -1}}) {
    CHECK(bridge_from_marked_tree(marked_tree_from_bridge(LatticeBridge(b))).data() == b);
  }
}

TEST_CASE("marked cyclic forest codec") {
  const CodingWalk w1(V{0, -1, -2, -3, -3, -3, -1});
  auto m = mcf_from_walk(w1);
  REQUIRE(m.tree_count() == 1);
  CHECK(m.forest().trees[0] == tree({1, 1, 3, 0, 0, 0}));
  CHECK(m.mark() == NodeId{0, 3});

  const CodingWalk w2(V{0, -1, 0, -1, -2});
  m = mcf_from_walk(w2);
  REQUIRE(m.tree_count() == 2);
  CHECK(m.forest().trees[0] == PlaneTree::leaf());
  CHECK(m.forest().trees[1] == tree({2, 0, 0}));
  CHECK(m.mark() == NodeId{1, 0});
  CHECK(walk_from_mcf(m) == w2);

  const CodingWalk w3(V{0, -1, -2});
  m = mcf_from_walk(w3);
  CHECK(m.forest().trees == std::vector<PlaneTree>{PlaneTree::leaf(), PlaneTree::leaf()});
  CHECK(m.mark() == NodeId{1, 0});
  CHECK(walk_from_mcf(m) == w3);

  CHECK_THROWS_AS(MarkedCyclicForest(PlaneForest{{PlaneTree::leaf(), PlaneTree::leaf()}}, NodeId{0, 0}), Error);
}

TEST_CASE("forest_to_mcf rotates the marked tree to the end") {
  const auto a = tree({2, 0, 0});
  const auto b = tree({1, 0});
  const auto c = PlaneTree::leaf();
  auto m = forest_to_mcf(PlaneForest{{a, b}}, 1);
  CHECK(m.forest().trees == std::vector<PlaneTree>{b, a});
  CHECK(m.mark() == NodeId{1, 1});
  m = forest_to_mcf(PlaneForest{{a}}, 2);
  CHECK(m.forest().trees == std::vector<PlaneTree>{a});
  CHECK(m.mark() == NodeId{0, 2});
  m = forest_to_mcf(PlaneForest{{a, b, c}}, 4);
  CHECK(m.forest().trees == std::vector<PlaneTree>{c, a, b});
  CHECK(m.mark() == NodeId{2, 1});
  CHECK_THROWS_AS(forest_to_mcf(PlaneForest{{a}}, 3), Error);
}

TEST_CASE("mcf preimages") {
  const auto a = tree({2, 0, 0});
  const auto b = tree({1, 0});
  CHECK(mcf_preimages(MarkedCyclicForest(PlaneForest{{a}}, NodeId{0, 1})).size() == 1);
  const MarkedCyclicForest m(PlaneForest{{a, b}}, NodeId{1, 0});
  const auto pre = mcf_preimages(m);
  REQUIRE(pre.size() == 2);
  for (const auto& p : pre) {
    std::size_t global = 0;
    for (std::size_t t = 0; t < p.mark.tree; ++t) global += p.forest.trees[t].size();
    CHECK(forest_to_mcf(p.forest, global + p.mark.lex) == m);
  }
}

TEST_CASE("counts") {
  CHECK(count_mcf(validate({{0, 4}, {2, 2}})) == 15);
  CHECK(count_forests(validate({{0, 4}, {2, 2}})) == 5);
  CHECK(count_mcf(validate({{0, 1}})) == 1);
  CHECK(count_forests(validate({{0, 1}})) == 1);
  CHECK(count_mcf(validate({{0, 3}, {1, 2}, {3, 1}})) == 60);
  CHECK(count_forests(validate({{0, 3}, {1, 2}, {3, 1}})) == 10);
  // 40!/(20! 20!) * 20/40 needs more than 64 bits before the division
  CHECK(count_forests(validate({{0, 30}, {2, 10}, {1, 30}})).str().size() > 19);
}

TEST_CASE("enumeration agrees with the nested-structure oracle for n <= 7") {
  oracle::Enumerator e;
  for (std::size_t n = 1; n <= 7; ++n) {
    for (const auto& [h, forests] : oracle::forests_by_histogram(e, n)) {
      const auto s = to_sequence(h);
      std::set<std::vector<std::vector<std::int64_t>>> expect;
      std::size_t mcfs = 0;
      for (const auto& f : forests) {
        expect.insert(oracle::serialize(f));
        mcfs += oracle::size(f.back());
      }
      std::set<std::vector<std::vector<std::int64_t>>> got;
      for (const auto& f : enumerate_forests(s)) {
        std::vector<std::vector<std::int64_t>> ser;
        for (const auto& t : f.trees) ser.emplace_back(t.lex().begin(), t.lex().end());
        CHECK(got.insert(ser).second);
      }
      CHECK(got == expect);
      CHECK(count_forests(s) == forests.size());
      CHECK(count_mcf(s) == mcfs);
      std::size_t mcf_seen = 0;
      for_each_mcf(s, [&](const MarkedCyclicForest&) { ++mcf_seen; });
      CHECK(mcf_seen == mcfs);
    }
  }
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(enumerate_forests(validate({{0, 11}})), Error);
  CHECK(enumerate_forests(validate({{0, 11}}), 11).size() == 1);
}

TEST_CASE("sum of preimage counts over MCF(s) is n |F(s)|") {
  oracle::Enumerator e;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& [h, forests] : oracle::forests_by_histogram(e, n)) {
      const auto s = to_sequence(h);
      std::size_t total = 0;
      for_each_mcf(s, [&](const MarkedCyclicForest& m) { total += mcf_preimages(m).size(); });
      CHECK(total == n * forests.size());
    }
  }
}

TEST_CASE("degree preservation of the walk codec") {
  oracle::Enumerator e;
  for (const auto& f : e.forests(6)) {
    const auto pf = to_forest(f);
    const auto w = walk_from_forest(pf);
    const auto inc = w.increments();
    D deg;
    for (auto x : inc) deg.push_back(x + 1);
    CHECK(histogram(deg) == pf.degree_sequence());
    CHECK(forest_from_walk(w) == pf);
  }
}

TEST_CASE("json") {
  const MarkedCyclicForest m(PlaneForest{{PlaneTree::leaf(), tree({2, 0, 0})}}, NodeId{1, 2});
  nlohmann::json j;
  to_json(j, m);
  CHECK(j.dump() == R"({"mark":[1,2],"trees":[[0],[2,0,0]]})");
  CHECK(mcf_from_json(j) == m);
  CHECK(forest_from_json(j) == m.forest());
  CHECK_THROWS_AS(forest_from_json(nlohmann::json::parse(R"({"trees":[[1]]})")), Error);
}
