#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pforest/degseq.hpp"
#include "pforest/forest_codec.hpp"
#include "pforest/lattice_paths.hpp"
#include "pforest/rng.hpp"

namespace pforest {

/// Forward Fisher-Yates on the first `prefix` positions: afterwards
/// values[0..prefix) is a uniform ordered sample without replacement, and with
/// prefix >= size()-1 the whole range is a uniform permutation. A shorter
/// prefix consumes the same draws as the start of a full shuffle.
void shuffle_prefix(std::span<Degree> values, std::size_t prefix, SeededRng& rng);

/// Uniform arrangement of d(s).
DegreeVector shuffle_degrees(const DegreeSequence& s, SeededRng& rng);

/// Uniform on MCF(s): decode the walk of a shuffled degree vector.
MarkedCyclicForest sample_mcf(const DegreeSequence& s, SeededRng& rng);

/// Uniform on F(s): sample_mcf, then one of its c(s) preimage rotations
/// chosen uniformly, with the mark dropped.
PlaneForest sample_forest(const DegreeSequence& s, SeededRng& rng);

struct SampledForest {
  MarkedCyclicForest mcf;
  /// Rotation applied to obtain the forest (see mcf_preimage).
  std::size_t rotation = 0;
  MarkedForest forest;
};

/// sample_forest keeping the marked cyclic forest it was pulled back from.
SampledForest sample_marked_forest(const DegreeSequence& s, SeededRng& rng);

struct RankedForest {
  /// Trees in decreasing size, ties in original order.
  PlaneForest forest;
  /// order[i] is the original index of the i-th ranked tree.
  std::vector<std::size_t> order;
  std::vector<std::size_t> sizes;
};

RankedForest ranked_trees(const PlaneForest& f);

/// Ranking by size only; ties keep the original order.
std::vector<std::size_t> rank_by_size(std::span<const std::size_t> sizes);

struct WalkStatisticsOptions {
  /// Number of largest trees whose degree distributions are reported.
  std::size_t tree_dists = 0;
  bool keep_walk = false;
};

/// Summary of one replicate of the forest sampler, read off the coding walk in
/// O(n) without building trees. Consumes the same draws as sample_forest.
struct WalkStatistics {
  std::size_t n = 0;
  std::size_t c = 0;
  /// Total size of the non-marked trees: first time the walk reaches -(c-1).
  std::size_t tau_n = 0;
  /// Tree sizes in forest order (after the uniform rotation).
  std::vector<std::size_t> sizes;
  /// Sizes in decreasing order.
  std::vector<std::size_t> ranked_sizes;
  /// Forest index of the marked tree.
  std::size_t marked_index = 0;
  /// Whether the marked tree is the largest tree T_1 of the ranking.
  bool largest_is_marked = false;
  /// Degree histograms of the ranked trees 1..tree_dists (fewer if c is smaller).
  std::vector<EmpiricalDist> tree_dists;
  /// Coding walk values, when requested.
  std::vector<Level> walk;
};

WalkStatistics walk_statistics(const DegreeSequence& s, SeededRng& rng,
                               const WalkStatisticsOptions& options = {});

}  // namespace pforest
