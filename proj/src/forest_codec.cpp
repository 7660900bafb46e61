#include "pforest/forest_codec.hpp"

#include <algorithm>
#include <string>

#include "pforest/error.hpp"

namespace pforest {

namespace {

bool is_lex_tree(std::span<const Degree> lex) {
  if (lex.empty()) return false;
  Level w = 0;
  for (std::size_t i = 0; i < lex.size(); ++i) {
    if (lex[i] < 0) return false;
    w += lex[i] - 1;
    if (w < 0 && i + 1 < lex.size()) return false;
  }
  return w == -1;
}

std::vector<Degree> degrees_of(std::span<const Level> path) {
  std::vector<Degree> d(path.size() - 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = path[i + 1] - path[i] + 1;
  return d;
}

}  // namespace

PlaneTree::PlaneTree(std::vector<Degree> lex) : lex_(std::move(lex)) {
  if (!is_lex_tree(lex_)) throw Error(Errc::MalformedTree, "degree list is not the lex order of a plane tree");
}

std::vector<std::size_t> PlaneTree::parents() const {
  const std::size_t n = size();
  std::vector<std::size_t> parent(n, n);
  // Stack of (node, children still to attach).
  std::vector<std::pair<std::size_t, Degree>> open;
  for (std::size_t v = 0; v < n; ++v) {
    if (!open.empty()) {
      parent[v] = open.back().first;
      if (--open.back().second == 0) open.pop_back();
    }
    if (lex_[v] > 0) open.emplace_back(v, lex_[v]);
  }
  return parent;
}

std::vector<std::size_t> PlaneTree::depths() const {
  const auto parent = parents();
  std::vector<std::size_t> depth(size(), 0);
  // Parents precede children in lex order.
  for (std::size_t v = 1; v < size(); ++v) depth[v] = depth[parent[v]] + 1;
  return depth;
}

std::vector<std::vector<std::size_t>> PlaneTree::children() const {
  const auto parent = parents();
  std::vector<std::vector<std::size_t>> kids(size());
  for (std::size_t v = 1; v < size(); ++v) kids[parent[v]].push_back(v);
  return kids;
}

std::size_t PlaneForest::size() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.size();
  return n;
}

DegreeSequence PlaneForest::degree_sequence() const {
  std::map<Degree, Count> counts;
  for (const auto& t : trees) {
    for (Degree d : t.lex()) ++counts[d];
  }
  return DegreeSequence::validate(counts);
}

MarkedCyclicForest::MarkedCyclicForest(PlaneForest forest, NodeId mark)
    : forest_(std::move(forest)), mark_(mark) {
  if (forest_.trees.empty()) throw Error(Errc::InvalidArgument, "forest has no trees");
  if (mark_.tree + 1 != forest_.trees.size() || mark_.lex >= forest_.trees.back().size()) {
    throw Error(Errc::InvalidArgument, "mark must be a node of the last tree");
  }
}

std::span<const Degree> lex_degrees(const PlaneTree& t) { return t.lex(); }

FirstPassageBridge dfw_encode(const PlaneTree& t) {
  std::vector<Level> w(t.size() + 1, 0);
  const auto lex = t.lex();
  for (std::size_t i = 0; i < lex.size(); ++i) w[i + 1] = w[i] + lex[i] - 1;
  return FirstPassageBridge(std::move(w));
}

PlaneTree dfw_decode(const FirstPassageBridge& b) { return PlaneTree(degrees_of(b.values())); }

PlaneTree dfw_decode(std::span<const Level> b) {
  if (!is_first_passage(b)) throw Error(Errc::MalformedBridge, "not a first-passage bridge");
  return PlaneTree(degrees_of(b));
}

MarkedTree marked_tree_from_bridge(const LatticeBridge& b) {
  const std::size_t r = rotation_index(b);
  const LatticeBridge shifted = cyclic_shift(b, r);
  PlaneTree t(degrees_of(shifted.values()));
  const std::size_t mark = t.size() - r;
  return MarkedTree{std::move(t), mark};
}

LatticeBridge bridge_from_marked_tree(const MarkedTree& m) {
  const std::size_t n = m.tree.size();
  if (m.mark >= n) throw Error(Errc::InvalidArgument, "mark outside the tree");
  const FirstPassageBridge fpb = dfw_encode(m.tree);
  // Undo the rotation by r = n - mark: shift by mark (a full turn when mark = 0).
  return cyclic_shift(fpb, m.mark == 0 ? n : m.mark);
}

MarkedCyclicForest mcf_from_walk(const CodingWalk& w) {
  const auto segments = split_at_passage_times(w);
  PlaneForest f;
  f.trees.reserve(segments.size());
  for (std::size_t j = 0; j + 1 < segments.size(); ++j) {
    f.trees.emplace_back(degrees_of(segments[j].values()));
  }
  MarkedTree last = marked_tree_from_bridge(segments.back());
  f.trees.push_back(std::move(last.tree));
  const NodeId mark{f.trees.size() - 1, last.mark};
  return MarkedCyclicForest(std::move(f), mark);
}

CodingWalk walk_from_mcf(const MarkedCyclicForest& m) {
  const auto& trees = m.forest().trees;
  std::vector<LatticeBridge> segments;
  segments.reserve(trees.size());
  for (std::size_t j = 0; j + 1 < trees.size(); ++j) segments.push_back(dfw_encode(trees[j]));
  segments.push_back(bridge_from_marked_tree(MarkedTree{trees.back(), m.mark().lex}));
  return concatenate(segments);
}

PlaneForest forest_from_walk(const CodingWalk& w) {
  const Level c = w.depth();
  const auto v = w.values();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] <= -c) throw Error(Errc::MalformedBridge, "walk reaches -c before its end");
  }
  PlaneForest f;
  for (const auto& seg : split_at_passage_times(w)) f.trees.emplace_back(degrees_of(seg.values()));
  return f;
}

CodingWalk walk_from_forest(const PlaneForest& f) {
  std::vector<Degree> lex;
  lex.reserve(f.size());
  for (const auto& t : f.trees) lex.insert(lex.end(), t.lex().begin(), t.lex().end());
  return walk_from_degrees(lex);
}

MarkedCyclicForest forest_to_mcf(const PlaneForest& f, std::size_t node) {
  std::size_t tree = 0;
  std::size_t offset = node;
  while (tree < f.trees.size() && offset >= f.trees[tree].size()) {
    offset -= f.trees[tree].size();
    ++tree;
  }
  if (tree == f.trees.size()) throw Error(Errc::InvalidArgument, "node index outside the forest");
  const std::size_t c = f.trees.size();
  PlaneForest rotated;
  rotated.trees.reserve(c);
  for (std::size_t j = 1; j <= c; ++j) rotated.trees.push_back(f.trees[(tree + j) % c]);
  return MarkedCyclicForest(std::move(rotated), NodeId{c - 1, offset});
}

MarkedForest mcf_preimage(const MarkedCyclicForest& m, std::size_t j) {
  const std::size_t c = m.tree_count();
  if (j >= c) throw Error(Errc::InvalidArgument, "rotation index outside [0, c)");
  MarkedForest out;
  out.forest.trees.reserve(c);
  for (std::size_t i = 0; i < c; ++i) out.forest.trees.push_back(m.forest().trees[(j + i) % c]);
  out.mark = NodeId{c - 1 - j, m.mark().lex};
  return out;
}

std::vector<MarkedForest> mcf_preimages(const MarkedCyclicForest& m) {
  std::vector<MarkedForest> out;
  out.reserve(m.tree_count());
  for (std::size_t j = 0; j < m.tree_count(); ++j) out.push_back(mcf_preimage(m, j));
  return out;
}

BigInt count_mcf(const DegreeSequence& s) {
  BigInt num = 1;
  for (Count k = 2; k <= s.n(); ++k) num *= k;
  BigInt den = 1;
  for (const auto& [degree, count] : s.counts()) {
    for (Count k = 2; k <= count; ++k) den *= k;
  }
  return num / den;
}

BigInt count_forests(const DegreeSequence& s) { return count_mcf(s) * s.c() / s.n(); }

namespace {

void check_cap(const DegreeSequence& s, std::size_t cap) {
  if (static_cast<std::size_t>(s.n()) > cap) {
    throw Error(Errc::CapExceeded, "n = " + std::to_string(s.n()) + " exceeds enumeration cap " + std::to_string(cap));
  }
}

}  // namespace

void for_each_forest(const DegreeSequence& s, const std::function<void(const PlaneForest&)>& visit,
                     std::size_t cap) {
  check_cap(s, cap);
  auto d = degree_vector(s);
  const Level c = s.c();
  do {
    // A forest code first reaches -c at its last step.
    Level w = 0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < d.size() && ok; ++i) {
      w += d[i] - 1;
      ok = w > -c;
    }
    if (ok) visit(forest_from_walk(walk_from_degrees(d)));
  } while (std::next_permutation(d.begin(), d.end()));
}

std::vector<PlaneForest> enumerate_forests(const DegreeSequence& s, std::size_t cap) {
  std::vector<PlaneForest> out;
  for_each_forest(s, [&](const PlaneForest& f) { out.push_back(f); }, cap);
  return out;
}

void for_each_mcf(const DegreeSequence& s, const std::function<void(const MarkedCyclicForest&)>& visit,
                  std::size_t cap) {
  check_cap(s, cap);
  auto d = degree_vector(s);
  do {
    visit(mcf_from_walk(walk_from_degrees(d)));
  } while (std::next_permutation(d.begin(), d.end()));
}

void to_json(nlohmann::json& j, const PlaneTree& t) {
  j = std::vector<Degree>(t.lex().begin(), t.lex().end());
}

void to_json(nlohmann::json& j, const PlaneForest& f) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : f.trees) trees.push_back(t);
  j = nlohmann::json{{"trees", trees}};
}

void to_json(nlohmann::json& j, const MarkedCyclicForest& m) {
  to_json(j, m.forest());
  j["mark"] = {m.mark().tree, m.mark().lex};
}

PlaneForest forest_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("trees") || !j.at("trees").is_array()) {
    throw Error(Errc::InvalidArgument, "forest JSON needs a \"trees\" array");
  }
  PlaneForest f;
  for (const auto& t : j.at("trees")) {
    if (!t.is_array()) throw Error(Errc::InvalidArgument, "each tree must be a lex-degree array");
    std::vector<Degree> lex;
    for (const auto& x : t) {
      if (!x.is_number_integer()) throw Error(Errc::InvalidArgument, "degrees must be integers");
      lex.push_back(x.get<Degree>());
    }
    f.trees.emplace_back(std::move(lex));
  }
  if (f.trees.empty()) throw Error(Errc::InvalidArgument, "forest has no trees");
  return f;
}

MarkedCyclicForest mcf_from_json(const nlohmann::json& j) {
  PlaneForest f = forest_from_json(j);
  if (!j.contains("mark") || !j.at("mark").is_array() || j.at("mark").size() != 2) {
    throw Error(Errc::InvalidArgument, "marked forest JSON needs \"mark\": [tree, lex]");
  }
  const NodeId mark{j.at("mark")[0].get<std::size_t>(), j.at("mark")[1].get<std::size_t>()};
  return MarkedCyclicForest(std::move(f), mark);
}

}  // namespace pforest
