#pragma once
// Reference implementations used as test oracles. Nothing here calls the
// library's codecs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace oracle {

struct Tree {
  std::vector<Tree> children;
};

inline std::size_t size(const Tree& t) {
  std::size_t n = 1;
  for (const auto& c : t.children) n += size(c);
  return n;
}

inline void preorder(const Tree& t, std::vector<std::int64_t>& out) {
  out.push_back(static_cast<std::int64_t>(t.children.size()));
  for (const auto& c : t.children) preorder(c, out);
}

inline std::vector<std::int64_t> preorder(const Tree& t) {
  std::vector<std::int64_t> out;
  preorder(t, out);
  return out;
}

// Depth of each node and parent index, in preorder.
inline void walk(const Tree& t, int depth, int parent, std::vector<int>& depths, std::vector<int>& parents) {
  const int me = static_cast<int>(depths.size());
  depths.push_back(depth);
  parents.push_back(parent);
  for (const auto& c : t.children) walk(c, depth + 1, me, depths, parents);
}

// Graph distance matrix through lowest common ancestors.
inline std::vector<std::vector<int>> distances(const Tree& t) {
  std::vector<int> depths, parents;
  walk(t, 0, -1, depths, parents);
  const auto n = depths.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int a = static_cast<int>(i), b = static_cast<int>(j);
      while (a != b) {
        if (depths[a] >= depths[b]) a = parents[a];
        else b = parents[b];
      }
      d[i][j] = depths[i] + depths[j] - 2 * depths[a];
    }
  }
  return d;
}

using Forest = std::vector<Tree>;

// All ordered forests with exactly n nodes (n >= 0), and all trees with n nodes.
class Enumerator {
 public:
  const std::vector<Tree>& trees(std::size_t n) {
    if (auto it = trees_.find(n); it != trees_.end()) return it->second;
    std::vector<Tree> out;
    if (n >= 1) {
      for (const auto& f : forests(n - 1)) out.push_back(Tree{f});
    }
    return trees_[n] = std::move(out);
  }

  const std::vector<Forest>& forests(std::size_t n) {
    if (auto it = forests_.find(n); it != forests_.end()) return it->second;
    std::vector<Forest> out;
    if (n == 0) {
      out.push_back({});
    } else {
      for (std::size_t first = 1; first <= n; ++first) {
        for (const auto& t : trees(first)) {
          for (const auto& rest : forests(n - first)) {
            Forest f{t};
            f.insert(f.end(), rest.begin(), rest.end());
            out.push_back(std::move(f));
          }
        }
      }
    }
    return forests_[n] = std::move(out);
  }

 private:
  std::map<std::size_t, std::vector<Tree>> trees_;
  std::map<std::size_t, std::vector<Forest>> forests_;
};

using Histogram = std::map<std::int64_t, std::int64_t>;

inline Histogram histogram(const Forest& f) {
  Histogram h;
  for (const auto& t : f) {
    for (auto d : preorder(t)) ++h[d];
  }
  return h;
}

inline std::vector<std::vector<std::int64_t>> serialize(const Forest& f) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& t : f) out.push_back(preorder(t));
  return out;
}

// Forests with n nodes bucketed by degree histogram.
inline std::map<Histogram, std::vector<Forest>> forests_by_histogram(Enumerator& e, std::size_t n) {
  std::map<Histogram, std::vector<Forest>> out;
  for (const auto& f : e.forests(n)) out[histogram(f)].push_back(f);
  return out;
}

inline std::uint64_t factorial(std::uint64_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace oracle
