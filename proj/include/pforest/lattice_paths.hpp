#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"
#include "pforest/degseq.hpp"

namespace pforest {

using Level = std::int64_t;

/// Integer path b(0..n) with b(0) = 0 and every step b(i+1) - b(i) >= -1.
/// Stored as values, so minima and hitting times are direct scans.
class LatticePath {
 public:
  /// Throws Error{MalformedBridge} when the path is empty, does not start at 0,
  /// or has a step below -1.
  explicit LatticePath(std::vector<Level> values);

  std::span<const Level> values() const { return values_; }
  const std::vector<Level>& data() const { return values_; }
  /// Number of steps n.
  std::size_t length() const { return values_.size() - 1; }
  Level operator[](std::size_t i) const { return values_[i]; }
  Level back() const { return values_.back(); }
  std::vector<Level> increments() const;

  bool operator==(const LatticePath&) const = default;

 protected:
  std::vector<Level> values_;
};

/// Lattice path ending at -1 (n >= 1).
class LatticeBridge : public LatticePath {
 public:
  explicit LatticeBridge(std::vector<Level> values);
};

/// Lattice bridge whose first visit to -1 is at time n.
class FirstPassageBridge : public LatticeBridge {
 public:
  explicit FirstPassageBridge(std::vector<Level> values);
};

/// Lattice path ending at -k with k >= 1; encodes a marked cyclic forest of k trees.
class CodingWalk : public LatticePath {
 public:
  explicit CodingWalk(std::vector<Level> values);
  /// Terminal depth k = -W(n).
  Level depth() const { return -back(); }
};

bool is_lattice_path(std::span<const Level> values);
bool is_bridge(std::span<const Level> values);
bool is_first_passage(std::span<const Level> values);
inline bool is_first_passage(const LatticePath& b) { return is_first_passage(b.values()); }

/// W(j) = sum_{i <= j} (c_i - 1). Throws Error{NotAWalk} unless the sum is negative,
/// Error{InvalidArgument} on a negative entry.
CodingWalk walk_from_degrees(std::span<const Degree> degrees);

/// Rotation b^(k)(i) = b(k+i) - b(k), where b(n+i) = -1 + b(i). Requires 1 <= k <= n.
LatticeBridge cyclic_shift(const LatticeBridge& b, std::size_t k);

/// First index r in [1, n] at which b attains its minimum. The shift by r is
/// the only rotation that is a first-passage bridge.
std::size_t rotation_index(const LatticeBridge& b);

/// Times tau(-1) < ... < tau(-(k-1)) at which W first reaches each level.
std::vector<std::size_t> passage_times(const CodingWalk& w);

/// Segments of W cut at its first passages below 0, -1, ..., -(k-2), re-based
/// to start at 0. The first k-1 are first-passage bridges, the last a bridge.
std::vector<LatticeBridge> split_at_passage_times(const CodingWalk& w);

/// Inverse of split_at_passage_times.
CodingWalk concatenate(std::span<const LatticeBridge> segments);

void to_json(nlohmann::json& j, const LatticePath& b);
std::vector<Level> levels_from_json(const nlohmann::json& j);
/// One value per row, with a "value" header.
void write_csv(std::ostream& os, const LatticePath& b);

}  // namespace pforest
