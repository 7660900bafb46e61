#include "pforest/lattice_paths.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "pforest/error.hpp"

namespace pforest {

bool is_lattice_path(std::span<const Level> values) {
  if (values.empty() || values[0] != 0) return false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] - values[i - 1] < -1) return false;
  }
  return true;
}

bool is_bridge(std::span<const Level> values) {
  return values.size() >= 2 && is_lattice_path(values) && values.back() == -1;
}

bool is_first_passage(std::span<const Level> values) {
  if (!is_bridge(values)) return false;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i] < 0) return false;
  }
  return true;
}

LatticePath::LatticePath(std::vector<Level> values) : values_(std::move(values)) {
  if (!is_lattice_path(values_)) {
    throw Error(Errc::MalformedBridge, "not a lattice path (must start at 0 with steps >= -1)");
  }
}

std::vector<Level> LatticePath::increments() const {
  std::vector<Level> inc(length());
  for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = values_[i + 1] - values_[i];
  return inc;
}

LatticeBridge::LatticeBridge(std::vector<Level> values) : LatticePath(std::move(values)) {
  if (length() < 1 || back() != -1) throw Error(Errc::MalformedBridge, "lattice bridge must end at -1");
}

FirstPassageBridge::FirstPassageBridge(std::vector<Level> values) : LatticeBridge(std::move(values)) {
  if (!is_first_passage(values_)) throw Error(Errc::MalformedBridge, "bridge reaches -1 before its end");
}

CodingWalk::CodingWalk(std::vector<Level> values) : LatticePath(std::move(values)) {
  if (length() < 1 || back() >= 0) throw Error(Errc::NotAWalk, "coding walk must end below 0");
}

CodingWalk walk_from_degrees(std::span<const Degree> degrees) {
  std::vector<Level> w(degrees.size() + 1, 0);
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] < 0) throw Error(Errc::InvalidArgument, "negative degree");
    w[i + 1] = w[i] + degrees[i] - 1;
  }
  if (w.back() >= 0) {
    throw Error(Errc::NotAWalk, "sum of (degree - 1) is " + std::to_string(w.back()) + ", must be negative");
  }
  return CodingWalk(std::move(w));
}

LatticeBridge cyclic_shift(const LatticeBridge& b, std::size_t k) {
  const std::size_t n = b.length();
  if (k < 1 || k > n) throw Error(Errc::InvalidArgument, "shift must lie in [1, n]");
  std::vector<Level> out(n + 1);
  const Level base = b[k];
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t j = k + i;
    const Level v = j <= n ? b[j] : -1 + b[j - n];
    out[i] = v - base;
  }
  return LatticeBridge(std::move(out));
}

std::size_t rotation_index(const LatticeBridge& b) {
  const auto v = b.values();
  std::size_t r = 1;
  for (std::size_t i = 2; i < v.size(); ++i) {
    if (v[i] < v[r]) r = i;
  }
  return r;
}

std::vector<std::size_t> passage_times(const CodingWalk& w) {
  const Level k = w.depth();
  std::vector<std::size_t> times;
  times.reserve(static_cast<std::size_t>(k - 1));
  Level next = -1;
  const auto v = w.values();
  for (std::size_t i = 1; i < v.size() && next > -k; ++i) {
    // Steps are >= -1 downward, so each level is hit exactly, in order.
    if (v[i] == next) {
      times.push_back(i);
      --next;
    }
  }
  return times;
}

std::vector<LatticeBridge> split_at_passage_times(const CodingWalk& w) {
  const auto cuts = passage_times(w);
  std::vector<LatticeBridge> segments;
  segments.reserve(cuts.size() + 1);
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::vector<Level> seg(w.values().begin() + static_cast<std::ptrdiff_t>(start),
                           w.values().begin() + static_cast<std::ptrdiff_t>(end) + 1);
    const Level base = seg.front();
    for (auto& x : seg) x -= base;
    segments.emplace_back(std::move(seg));
    start = end;
  };
  for (std::size_t cut : cuts) emit(cut);
  emit(w.length());
  return segments;
}

CodingWalk concatenate(std::span<const LatticeBridge> segments) {
  std::vector<Level> w{0};
  for (const auto& seg : segments) {
    const Level base = w.back();
    for (std::size_t i = 1; i < seg.values().size(); ++i) w.push_back(base + seg[i]);
  }
  return CodingWalk(std::move(w));
}

void to_json(nlohmann::json& j, const LatticePath& b) { j = b.data(); }

std::vector<Level> levels_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::InvalidArgument, "path must be a JSON array");
  std::vector<Level> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw Error(Errc::InvalidArgument, "path entries must be integers");
    v.push_back(x.get<Level>());
  }
  return v;
}

void write_csv(std::ostream& os, const LatticePath& b) {
  os << "value\n";
  for (Level v : b.values()) os << v << '\n';
}

}  // namespace pforest
