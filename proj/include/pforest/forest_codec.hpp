#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "pforest/degseq.hpp"
#include "pforest/lattice_paths.hpp"

namespace pforest {

using BigInt = boost::multiprecision::cpp_int;

/// Plane tree stored canonically as its degrees in lexicographic
/// (depth-first, children left to right) order. Explicit child lists are
/// derived on demand.
class PlaneTree {
 public:
  /// Throws Error{MalformedTree} unless `lex` is the lex-degree list of a tree.
  explicit PlaneTree(std::vector<Degree> lex);
  static PlaneTree leaf() { return PlaneTree(std::vector<Degree>{0}); }

  std::size_t size() const { return lex_.size(); }
  std::span<const Degree> lex() const { return lex_; }

  /// Parent of each node in lex order; the root maps to size().
  std::vector<std::size_t> parents() const;
  std::vector<std::size_t> depths() const;
  std::vector<std::vector<std::size_t>> children() const;

  auto operator<=>(const PlaneTree&) const = default;

 private:
  std::vector<Degree> lex_;
};

struct PlaneForest {
  std::vector<PlaneTree> trees;

  std::size_t size() const;
  DegreeSequence degree_sequence() const;
  auto operator<=>(const PlaneForest&) const = default;
};

/// Node identity: tree index and lex position, both zero-based.
struct NodeId {
  std::size_t tree = 0;
  std::size_t lex = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct MarkedTree {
  PlaneTree tree;
  std::size_t mark = 0;
  auto operator<=>(const MarkedTree&) const = default;
};

struct MarkedForest {
  PlaneForest forest;
  NodeId mark;
  auto operator<=>(const MarkedForest&) const = default;
};

/// Marked forest whose mark lies in its last tree.
class MarkedCyclicForest {
 public:
  /// Throws Error{InvalidArgument} if the mark is not a node of the last tree.
  MarkedCyclicForest(PlaneForest forest, NodeId mark);

  const PlaneForest& forest() const { return forest_; }
  NodeId mark() const { return mark_; }
  std::size_t tree_count() const { return forest_.trees.size(); }

  auto operator<=>(const MarkedCyclicForest&) const = default;

 private:
  PlaneForest forest_;
  NodeId mark_;
};

std::span<const Degree> lex_degrees(const PlaneTree& t);

FirstPassageBridge dfw_encode(const PlaneTree& t);
PlaneTree dfw_decode(const FirstPassageBridge& b);
/// Validating overload; throws Error{MalformedBridge} if `b` is not a first-passage bridge.
PlaneTree dfw_decode(std::span<const Level> b);

/// Rotates b to its first-passage form b^(r) and marks lex node |T| - r.
MarkedTree marked_tree_from_bridge(const LatticeBridge& b);
LatticeBridge bridge_from_marked_tree(const MarkedTree& m);

MarkedCyclicForest mcf_from_walk(const CodingWalk& w);
CodingWalk walk_from_mcf(const MarkedCyclicForest& m);

/// Plain forest coding: concatenated depth-first walks, first reaching -c at n.
PlaneForest forest_from_walk(const CodingWalk& w);
CodingWalk walk_from_forest(const PlaneForest& f);

/// Marks node `node` (zero-based, counted across the trees in order) and
/// rotates the trees so that the marked tree comes last.
MarkedCyclicForest forest_to_mcf(const PlaneForest& f, std::size_t node);

/// The j-th of the c marked forests mapping onto m: trees (T_j, ..., T_{c-1}, T_0, ..., T_{j-1}).
MarkedForest mcf_preimage(const MarkedCyclicForest& m, std::size_t j);
std::vector<MarkedForest> mcf_preimages(const MarkedCyclicForest& m);

/// n! / prod s_i!
BigInt count_mcf(const DegreeSequence& s);
/// c(s)/n * count_mcf(s)
BigInt count_forests(const DegreeSequence& s);

inline constexpr std::size_t kDefaultEnumerationCap = 10;

/// Visits every plane forest with degree sequence s exactly once.
/// Throws Error{CapExceeded} when n > cap.
void for_each_forest(const DegreeSequence& s, const std::function<void(const PlaneForest&)>& visit,
                     std::size_t cap = kDefaultEnumerationCap);
std::vector<PlaneForest> enumerate_forests(const DegreeSequence& s, std::size_t cap = kDefaultEnumerationCap);
/// Visits every marked cyclic forest with degree sequence s exactly once.
void for_each_mcf(const DegreeSequence& s, const std::function<void(const MarkedCyclicForest&)>& visit,
                  std::size_t cap = kDefaultEnumerationCap);

void to_json(nlohmann::json& j, const PlaneTree& t);
void to_json(nlohmann::json& j, const PlaneForest& f);
void to_json(nlohmann::json& j, const MarkedCyclicForest& m);
/// Parses {"trees": [[...], ...], "mark": [tree, lex]?}.
PlaneForest forest_from_json(const nlohmann::json& j);
MarkedCyclicForest mcf_from_json(const nlohmann::json& j);

}  // namespace pforest
