#include "pforest/sampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace pforest {

void shuffle_prefix(std::span<Degree> values, std::size_t prefix, SeededRng& rng) {
  const std::size_t n = values.size();
  const std::size_t stop = std::min(prefix, n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < stop; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(values[i], values[j]);
  }
}

DegreeVector shuffle_degrees(const DegreeSequence& s, SeededRng& rng) {
  DegreeVector d = degree_vector(s);
  shuffle_prefix(d, d.size(), rng);
  return d;
}

MarkedCyclicForest sample_mcf(const DegreeSequence& s, SeededRng& rng) {
  return mcf_from_walk(walk_from_degrees(shuffle_degrees(s, rng)));
}

SampledForest sample_marked_forest(const DegreeSequence& s, SeededRng& rng) {
  MarkedCyclicForest m = sample_mcf(s, rng);
  const auto rotation = static_cast<std::size_t>(rng.below(m.tree_count()));
  MarkedForest f = mcf_preimage(m, rotation);
  return SampledForest{std::move(m), rotation, std::move(f)};
}

PlaneForest sample_forest(const DegreeSequence& s, SeededRng& rng) {
  return sample_marked_forest(s, rng).forest.forest;
}

std::vector<std::size_t> rank_by_size(std::span<const std::size_t> sizes) {
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  return order;
}

RankedForest ranked_trees(const PlaneForest& f) {
  std::vector<std::size_t> sizes(f.trees.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) sizes[i] = f.trees[i].size();
  RankedForest r;
  r.order = rank_by_size(sizes);
  for (std::size_t i : r.order) {
    r.forest.trees.push_back(f.trees[i]);
    r.sizes.push_back(sizes[i]);
  }
  return r;
}

WalkStatistics walk_statistics(const DegreeSequence& s, SeededRng& rng,
                               const WalkStatisticsOptions& options) {
  DegreeVector d = shuffle_degrees(s, rng);
  WalkStatistics st;
  st.n = d.size();
  st.c = static_cast<std::size_t>(s.c());

  // Tree boundaries of the marked cyclic forest: first passages to -1..-(c-1).
  std::vector<std::size_t> bounds{0};
  bounds.reserve(st.c + 1);
  Level w = 0;
  Level next = -1;
  const Level last_level = -static_cast<Level>(st.c) + 1;
  if (options.keep_walk) {
    st.walk.reserve(st.n + 1);
    st.walk.push_back(0);
  }
  for (std::size_t i = 0; i < st.n; ++i) {
    w += d[i] - 1;
    if (options.keep_walk) st.walk.push_back(w);
    if (next >= last_level && w == next) {
      bounds.push_back(i + 1);
      --next;
    }
  }
  bounds.push_back(st.n);
  st.tau_n = bounds[st.c - 1];

  const auto rotation = static_cast<std::size_t>(rng.below(st.c));
  st.sizes.resize(st.c);
  std::vector<std::pair<std::size_t, std::size_t>> spans(st.c);
  for (std::size_t i = 0; i < st.c; ++i) {
    const std::size_t src = (rotation + i) % st.c;
    st.sizes[i] = bounds[src + 1] - bounds[src];
    spans[i] = {bounds[src], bounds[src + 1]};
  }
  st.marked_index = st.c - 1 - rotation;

  const auto order = rank_by_size(st.sizes);
  st.ranked_sizes.reserve(st.c);
  for (std::size_t i : order) st.ranked_sizes.push_back(st.sizes[i]);
  st.largest_is_marked = order.front() == st.marked_index;

  const std::size_t want = std::min(options.tree_dists, st.c);
  for (std::size_t l = 0; l < want; ++l) {
    const auto [begin, end] = spans[order[l]];
    st.tree_dists.push_back(empirical(std::span<const Degree>(d.data() + begin, end - begin)));
  }
  return st;
}

}  // namespace pforest
