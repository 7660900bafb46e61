#include "pforest/realtree_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include "pforest/error.hpp"

namespace pforest {

CodingFunction::CodingFunction(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size()) {
    throw Error(Errc::InvalidArgument, "coding function needs matching, nonempty time and value grids");
  }
  if (times_[0] != 0.0 || values_[0] != 0.0) throw Error(Errc::InvalidArgument, "coding function must start at g(0) = 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) throw Error(Errc::InvalidArgument, "coding function must be nonnegative");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw Error(Errc::InvalidArgument, "grid times must increase");
  }
}

CodingFunction CodingFunction::on_unit_grid(std::vector<double> values) {
  std::vector<double> times(values.size());
  std::iota(times.begin(), times.end(), 0.0);
  return CodingFunction(std::move(times), std::move(values));
}

std::size_t CodingFunction::segment(double t) const {
  if (!(t >= 0.0 && t <= support_end())) throw Error(Errc::DomainError, "time outside the support");
  // Last grid index with times_[i] <= t.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double CodingFunction::operator()(double t) const {
  const std::size_t i = segment(t);
  if (i + 1 == times_.size()) return values_[i];
  const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double CodingFunction::min_between(double s, double t) const {
  if (s > t) std::swap(s, t);
  double m = std::min((*this)(s), (*this)(t));
  for (std::size_t i = segment(s) + 1; i < times_.size() && times_[i] < t; ++i) m = std::min(m, values_[i]);
  return m;
}

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd distances, Eigen::VectorXd masses)
    : distances_(std::move(distances)), masses_(std::move(masses)) {
  const Eigen::Index k = distances_.rows();
  if (k == 0 || distances_.cols() != k) throw Error(Errc::InvalidArgument, "distance matrix must be square and nonempty");
  if (masses_.size() != 0 && masses_.size() != k) throw Error(Errc::InvalidArgument, "one mass per point");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(distances_(i, i)) > 1e-9) throw Error(Errc::InvalidArgument, "nonzero diagonal");
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!(distances_(i, j) >= -1e-9) || std::abs(distances_(i, j) - distances_(j, i)) > 1e-9) {
        throw Error(Errc::InvalidArgument, "distances must be symmetric and nonnegative");
      }
    }
  }
  for (Eigen::Index i = 0; i < masses_.size(); ++i) {
    if (!(masses_(i) >= 0.0)) throw Error(Errc::InvalidArgument, "masses must be nonnegative");
  }
}

Eigen::VectorXd FiniteMetricSpace::masses_or_uniform() const {
  if (has_masses()) return masses_;
  return Eigen::VectorXd::Constant(size(), 1.0 / static_cast<double>(size()));
}

double coding_pseudometric(const CodingFunction& g, double s, double t) {
  return g(s) + g(t) - 2.0 * g.min_between(s, t);
}

FiniteMetricSpace metric_snapshot(const CodingFunction& g, std::span<const double> times,
                                  std::vector<std::size_t>* classes) {
  const std::size_t k = times.size();
  if (k == 0) throw Error(Errc::InvalidArgument, "no sample times");
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> value(k);
  for (std::size_t i = 0; i < k; ++i) value[i] = g(times[i]);
  // gap_min[r] = min of g between the r-th and (r+1)-th sorted times.
  std::vector<double> gap_min(k > 0 ? k - 1 : 0);
  for (std::size_t r = 0; r + 1 < k; ++r) gap_min[r] = g.min_between(times[order[r]], times[order[r + 1]]);

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    double m = value[order[a]];
    for (std::size_t b = a + 1; b < k; ++b) {
      m = std::min(m, gap_min[b - 1]);
      const std::size_t i = order[a];
      const std::size_t j = order[b];
      const double d = std::max(0.0, value[i] + value[j] - 2.0 * m);
      full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      full(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }

  // Quotient by zero distance, classes numbered by first appearance.
  constexpr double kZero = 1e-12;
  std::vector<std::size_t> cls(k, k);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(reps[r])) <= kZero) {
        cls[i] = r;
        break;
      }
    }
    if (cls[i] == k) {
      cls[i] = reps.size();
      reps.push_back(i);
    }
  }
  const auto q = static_cast<Eigen::Index>(reps.size());
  Eigen::MatrixXd d(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) {
      d(a, b) = full(static_cast<Eigen::Index>(reps[static_cast<std::size_t>(a)]),
                     static_cast<Eigen::Index>(reps[static_cast<std::size_t>(b)]));
    }
  }
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(q);
  for (std::size_t i = 0; i < k; ++i) mass(static_cast<Eigen::Index>(cls[i])) += 1.0 / static_cast<double>(k);
  if (classes) *classes = std::move(cls);
  return FiniteMetricSpace(std::move(d), std::move(mass));
}

FiniteMetricSpace tree_graph_metric(const PlaneTree& t, double scale, double mass_per_node) {
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  const std::size_t n = t.size();
  const auto parent = t.parents();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 1; v < n; ++v) {
    adj[v].push_back(parent[v]);
    adj[parent[v]].push_back(v);
  }
  const auto k = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d(k, k);
  std::vector<std::size_t> hops(n);
  std::vector<std::size_t> queue(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(hops.begin(), hops.end(), n);
    hops[src] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = src;
    while (head < tail) {
      const std::size_t u = queue[head++];
      for (std::size_t w : adj[u]) {
        if (hops[w] == n) {
          hops[w] = hops[u] + 1;
          queue[tail++] = w;
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      d(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(v)) = scale * static_cast<double>(hops[v]);
    }
  }
  return FiniteMetricSpace(std::move(d), Eigen::VectorXd::Constant(k, mass_per_node));
}

namespace {

// Contour heights plus the first-visit index of each node.
std::pair<std::vector<double>, std::vector<double>> contour(const PlaneTree& t) {
  const auto kids = t.children();
  std::vector<double> heights{0.0};
  std::vector<double> first(t.size(), 0.0);
  heights.reserve(2 * t.size() - 1);
  // Stack of (node, next child slot).
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < kids[v].size()) {
      const std::size_t child = kids[v][next++];
      heights.push_back(static_cast<double>(stack.size()));
      first[child] = static_cast<double>(heights.size() - 1);
      stack.emplace_back(child, 0);
    } else {
      stack.pop_back();
      if (!stack.empty()) heights.push_back(static_cast<double>(stack.size() - 1));
    }
  }
  return {std::move(heights), std::move(first)};
}

}  // namespace

CodingFunction contour_function(const PlaneTree& t) { return CodingFunction::on_unit_grid(contour(t).first); }

std::vector<double> first_visit_times(const PlaneTree& t) { return contour(t).second; }

bool is_pseudometric(const FiniteMetricSpace& x, double tol) {
  const Eigen::Index k = x.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(x(i, i)) > tol) return false;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (x(i, j) < -tol || x(i, j) != x(j, i)) return false;
      for (Eigen::Index m = 0; m < k; ++m) {
        if (x(i, j) > x(i, m) + x(m, j) + tol) return false;
      }
    }
  }
  return true;
}

bool four_point_condition(const FiniteMetricSpace& x, double tol) {
  const Eigen::Index k = x.size();
  for (Eigen::Index w = 0; w < k; ++w) {
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        for (Eigen::Index z = 0; z < k; ++z) {
          const double lhs = x(w, a) + x(b, z);
          const double rhs = std::max(x(w, b) + x(a, z), x(w, z) + x(a, b));
          if (lhs > rhs + tol) return false;
        }
      }
    }
  }
  return true;
}

namespace {

using Pair = std::pair<Eigen::Index, Eigen::Index>;

/// Backtracking search for a correspondence of distortion <= delta.
class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy, double delta)
      : dx_(dx), dy_(dy), delta_(delta), covered_(static_cast<std::size_t>(dy.rows()), 0) {}

  bool run() {
    chosen_.clear();
    std::fill(covered_.begin(), covered_.end(), 0);
    return assign_x(0);
  }

  const std::vector<Pair>& pairs() const { return chosen_; }

  bool compatible(Eigen::Index x, Eigen::Index y) const {
    for (const auto& [a, b] : chosen_) {
      if (std::abs(dx_(x, a) - dy_(y, b)) > delta_) return false;
    }
    return true;
  }

  /// Adds every remaining compatible pair; keeps distortion <= delta.
  void saturate() {
    for (Eigen::Index x = 0; x < dx_.rows(); ++x) {
      for (Eigen::Index y = 0; y < dy_.rows(); ++y) {
        if (std::find(chosen_.begin(), chosen_.end(), Pair{x, y}) == chosen_.end() && compatible(x, y)) {
          chosen_.emplace_back(x, y);
        }
      }
    }
  }

 private:
  bool assign_x(Eigen::Index x) {
    if (x == dx_.rows()) return assign_y(0);
    for (Eigen::Index y = 0; y < dy_.rows(); ++y) {
      if (!compatible(x, y)) continue;
      chosen_.emplace_back(x, y);
      ++covered_[static_cast<std::size_t>(y)];
      if (assign_x(x + 1)) return true;
      --covered_[static_cast<std::size_t>(y)];
      chosen_.pop_back();
    }
    return false;
  }

  bool assign_y(Eigen::Index y) {
    while (y < dy_.rows() && covered_[static_cast<std::size_t>(y)] > 0) ++y;
    if (y == dy_.rows()) return true;
    for (Eigen::Index x = 0; x < dx_.rows(); ++x) {
      if (!compatible(x, y)) continue;
      chosen_.emplace_back(x, y);
      ++covered_[static_cast<std::size_t>(y)];
      if (assign_y(y + 1)) return true;
      --covered_[static_cast<std::size_t>(y)];
      chosen_.pop_back();
    }
    return false;
  }

  const Eigen::MatrixXd& dx_;
  const Eigen::MatrixXd& dy_;
  double delta_;
  std::vector<Pair> chosen_;
  std::vector<int> covered_;
};

double distortion(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy, const std::vector<Pair>& r) {
  double dis = 0.0;
  for (const auto& [a, b] : r) {
    for (const auto& [c, d] : r) dis = std::max(dis, std::abs(dx(a, c) - dy(b, d)));
  }
  return dis;
}

void check_small(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  if (x.size() > kBruteForceCap || y.size() > kBruteForceCap) {
    throw Error(Errc::TooLarge, "brute-force GH/GHP limited to " + std::to_string(kBruteForceCap) + " points");
  }
}

/// Sorted distinct candidate distortion levels |dx(a,c) - dy(b,d)|.
std::vector<double> distortion_levels(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy) {
  std::vector<double> levels{0.0};
  for (Eigen::Index a = 0; a < dx.rows(); ++a) {
    for (Eigen::Index c = a; c < dx.rows(); ++c) {
      for (Eigen::Index b = 0; b < dy.rows(); ++b) {
        for (Eigen::Index d = b; d < dy.rows(); ++d) levels.push_back(std::abs(dx(a, c) - dy(b, d)));
      }
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double u, double v) { return std::abs(u - v) <= 1e-12 * (1.0 + std::abs(v)); }),
               levels.end());
  return levels;
}

constexpr double kSlack = 1e-12;

/// Index of the least feasible level and the correspondence found there.
std::pair<std::size_t, std::vector<Pair>> least_feasible(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy,
                                                         const std::vector<double>& levels) {
  // The largest level is at least max(diam X, diam Y), where X x Y itself is a correspondence.
  std::size_t lo = 0, hi = levels.size() - 1;
  CorrespondenceSearch top(dx, dy, levels[hi] + kSlack);
  top.run();
  std::vector<Pair> best = top.pairs();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    CorrespondenceSearch search(dx, dy, levels[mid] + kSlack);
    if (search.run()) {
      hi = mid;
      best = search.pairs();
    } else {
      lo = mid + 1;
    }
  }
  return {hi, best};
}

/// inf{eps > 0 : mu(A) <= nu(A^eps) + eps} for A of mass `mass_a`, given the
/// distances from A to the support of nu and their masses.
double prokhorov_for_set(double mass_a, std::vector<std::pair<double, double>> dist_mass) {
  std::sort(dist_mass.begin(), dist_mass.end());
  double lower = 0.0;
  double covered = 0.0;
  std::size_t i = 0;
  while (true) {
    // On (lower, upper] the open enlargement holds exactly the points at distance <= lower.
    while (i < dist_mass.size() && dist_mass[i].first <= lower) covered += dist_mass[i++].second;
    const double upper = i < dist_mass.size() ? dist_mass[i].first : std::numeric_limits<double>::infinity();
    const double candidate = std::max(lower, mass_a - covered);
    if (candidate <= upper) return candidate;
    lower = upper;
  }
}

double prokhorov_glued(const Eigen::MatrixXd& zxy, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  const Eigen::Index nx = zxy.rows();
  const Eigen::Index ny = zxy.cols();
  double best = 0.0;
  for (unsigned mask = 1; mask < (1u << nx); ++mask) {
    double mass = 0.0;
    std::vector<std::pair<double, double>> dm(static_cast<std::size_t>(ny), {std::numeric_limits<double>::infinity(), 0.0});
    for (Eigen::Index a = 0; a < nx; ++a) {
      if (!(mask >> a & 1u)) continue;
      mass += mu(a);
      for (Eigen::Index y = 0; y < ny; ++y) {
        auto& e = dm[static_cast<std::size_t>(y)];
        e.first = std::min(e.first, zxy(a, y));
        e.second = nu(y);
      }
    }
    best = std::max(best, prokhorov_for_set(mass, std::move(dm)));
  }
  for (unsigned mask = 1; mask < (1u << ny); ++mask) {
    double mass = 0.0;
    std::vector<std::pair<double, double>> dm(static_cast<std::size_t>(nx), {std::numeric_limits<double>::infinity(), 0.0});
    for (Eigen::Index b = 0; b < ny; ++b) {
      if (!(mask >> b & 1u)) continue;
      mass += nu(b);
      for (Eigen::Index x = 0; x < nx; ++x) {
        auto& e = dm[static_cast<std::size_t>(x)];
        e.first = std::min(e.first, zxy(x, b));
        e.second = mu(x);
      }
    }
    best = std::max(best, prokhorov_for_set(mass, std::move(dm)));
  }
  return best;
}

}  // namespace

double gh_distance_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  check_small(x, y);
  const auto levels = distortion_levels(x.distances(), y.distances());
  const auto [index, pairs] = least_feasible(x.distances(), y.distances(), levels);
  (void)index;
  return 0.5 * distortion(x.distances(), y.distances(), pairs);
}

GhpBounds ghp_distance_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  check_small(x, y);
  const Eigen::MatrixXd& dx = x.distances();
  const Eigen::MatrixXd& dy = y.distances();
  const Eigen::VectorXd mu = x.masses_or_uniform();
  const Eigen::VectorXd nu = y.masses_or_uniform();

  const auto levels = distortion_levels(dx, dy);
  const auto [first, optimal] = least_feasible(dx, dy, levels);

  GhpBounds bounds;
  bounds.gh = 0.5 * distortion(dx, dy, optimal);
  bounds.lower = bounds.gh + std::abs(mu.sum() - nu.sum());
  bounds.upper = std::numeric_limits<double>::infinity();

  constexpr std::size_t kMaxLevels = 64;
  const std::size_t span = levels.size() - first;
  const std::size_t stride = std::max<std::size_t>(1, (span + kMaxLevels - 1) / kMaxLevels);
  for (std::size_t li = first; li < levels.size(); li += stride) {
    const double delta = levels[li];
    CorrespondenceSearch search(dx, dy, delta + kSlack);
    if (!search.run()) continue;
    search.saturate();
    const double r = 0.5 * delta;
    Eigen::MatrixXd zxy(dx.rows(), dy.rows());
    for (Eigen::Index a = 0; a < dx.rows(); ++a) {
      for (Eigen::Index b = 0; b < dy.rows(); ++b) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [p, q] : search.pairs()) best = std::min(best, dx(a, p) + r + dy(q, b));
        zxy(a, b) = best;
      }
    }
    // Every point lies within r of the other space, so the Hausdorff term is at most r.
    bounds.upper = std::min(bounds.upper, r + prokhorov_glued(zxy, mu, nu));
  }
  return bounds;
}

double gh_upper_bound_from_codings(const CodingFunction& f, const CodingFunction& g) {
  auto rescaled = [](const CodingFunction& h) {
    std::vector<double> t = h.times();
    const double end = h.support_end();
    if (end > 0.0) {
      for (double& v : t) v /= end;
    }
    return t;
  };
  const auto tf = rescaled(f);
  const auto tg = rescaled(g);
  std::vector<double> grid;
  grid.reserve(tf.size() + tg.size());
  std::merge(tf.begin(), tf.end(), tg.begin(), tg.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto eval = [](const CodingFunction& h, double u) {
    return h.support_end() > 0.0 ? h(std::min(u * h.support_end(), h.support_end())) : h.values()[0];
  };
  double sup = 0.0;
  for (double u : grid) sup = std::max(sup, std::abs(eval(f, u) - eval(g, u)));
  return 2.0 * sup;
}

void write_csv(std::ostream& os, const CodingFunction& g) {
  os << "t,g\n";
  os.precision(17);
  for (std::size_t i = 0; i < g.times().size(); ++i) os << g.times()[i] << ',' << g.values()[i] << '\n';
}

void to_json(nlohmann::json& j, const FiniteMetricSpace& x) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < x.size(); ++k) row.push_back(x(i, k));
    rows.push_back(row);
  }
  j = nlohmann::json{{"distances", rows}};
  if (x.has_masses()) {
    std::vector<double> m(x.masses().data(), x.masses().data() + x.masses().size());
    j["masses"] = m;
  }
}

}  // namespace pforest
