#include "pforest/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pforest/error.hpp"
#include "pforest/limit_sim.hpp"
#include "pforest/sampler.hpp"
#include "pforest/stats.hpp"

namespace pforest {

namespace {

enum Purpose : std::uint64_t { kForests = 1, kLimit = 2, kShuffle = 3, kBrownian = 4, kExact = 5 };

double sq(double x) { return x * x; }

struct Setup {
  DegreeSequence s;
  Count c;
  double sigma;
};

Setup build(const ExperimentConfig& cfg) {
  if (cfg.reps == 0) throw Error(Errc::InvalidArgument, "reps must be positive");
  if (cfg.sequence) return {*cfg.sequence, cfg.sequence->c(), limit_sigma(*cfg.sequence)};
  const Count cn = cfg.trees();
  if (cn < 1) throw Error(Errc::InvalidArgument, "cn must be at least 1");
  auto s = make_degree_sequence(OffspringLaw::parse(cfg.law), cfg.n, cn, cfg.seed);
  return {s, s.c(), limit_sigma(s)};
}

void require_small_cn(const Setup& st) {
  if (static_cast<double>(st.c) > std::pow(static_cast<double>(st.s.n()), 0.4) + 1e-9) {
    throw Error(Errc::InvalidArgument, "cn exceeds n^0.4");
  }
}

nlohmann::json base_parameters(const ExperimentConfig& cfg, const Setup& st) {
  nlohmann::json s;
  to_json(s, st.s);
  return {{"law", cfg.sequence ? "explicit" : cfg.law}, {"n", st.s.n()},   {"cn", st.c},       {"sigma", st.sigma},
          {"reps", cfg.reps}, {"seed", cfg.seed}, {"degree_sequence", s["counts"]}};
}

std::vector<WalkStatistics> run_forests(const ExperimentConfig& cfg, const DegreeSequence& s,
                                        const WalkStatisticsOptions& options) {
  std::vector<WalkStatistics> out(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
    auto rng = replicate_stream(cfg.seed, kForests, r);
    out[r] = walk_statistics(s, rng, options);
  });
  return out;
}

// Hitting-time CDF extended by 0 to t <= 0.
std::function<double(double)> tau_law(double sigma) {
  return [sigma](double t) { return t > 0.0 ? tau_cdf(t, sigma) : 0.0; };
}

std::string fmt(double v) {
  nlohmann::json j = v;
  return j.dump();
}

}  // namespace

Criterion criterion_le(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, "<=", value <= threshold};
}

Criterion criterion_ge(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, ">=", value >= threshold};
}

bool ExperimentReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

const Criterion* ExperimentReport::find(const std::string& name) const {
  for (const auto& c : criteria) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void to_json(nlohmann::json& j, const Criterion& c) {
  j = nlohmann::json{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                     {"relation", c.relation}, {"passed", c.passed}};
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = nlohmann::json{{"experiment", r.name},     {"parameters", r.parameters}, {"statistics", r.statistics},
                     {"criteria", r.criteria}, {"degenerate", r.degenerate}, {"passed", r.passed()}};
}

void write_raw_csv(std::ostream& out, const ExperimentReport& r) {
  for (std::size_t i = 0; i < r.raw_header.size(); ++i) out << (i ? "," : "") << r.raw_header[i];
  out << '\n';
  for (const auto& row : r.raw_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
    out << '\n';
  }
}

Count cn_from_exponent(Count n, double exponent) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  const double v = std::pow(static_cast<double>(n), exponent);
  return std::max<Count>(1, static_cast<Count>(std::floor(v + 1e-9)));
}

Count ExperimentConfig::trees() const { return cn ? *cn : cn_from_exponent(n, cn_exponent); }

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t r = next.fetch_add(1);
        if (r >= count) return;
        try {
          body(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SeededRng replicate_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t r) {
  auto base = SeededRng::substream(seed, purpose);
  return SeededRng::substream(base(), r);
}

ExperimentReport experiment_tau(const ExperimentConfig& cfg) {
  const auto st = build(cfg);
  require_small_cn(st);
  ExperimentReport rep;
  rep.name = "tau";
  rep.parameters = base_parameters(cfg, st);
  const auto runs = run_forests(cfg, st.s, {});
  const double scale = sq(static_cast<double>(st.c));

  std::vector<double> rest(cfg.reps);
  std::vector<double> tau(cfg.reps);
  std::size_t identity_violations = 0;
  std::size_t largest_marked = 0;
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    const auto& w = runs[r];
    const std::size_t others = w.n - w.ranked_sizes.front();
    rest[r] = static_cast<double>(others) / scale;
    tau[r] = static_cast<double>(w.tau_n) / scale;
    if (w.largest_is_marked) {
      ++largest_marked;
      if (others != w.tau_n) ++identity_violations;
    }
    if (cfg.keep_raw) rep.raw_rows.push_back({static_cast<double>(r), rest[r], tau[r], w.largest_is_marked ? 1.0 : 0.0});
  }
  rep.raw_header = {"replicate", "rest_scaled", "tau_scaled", "largest_is_marked"};
  rep.statistics["mean_rest_scaled"] = mean(rest);
  rep.statistics["median_rest_scaled"] = quantile(rest, 0.5);
  rep.statistics["limit_median"] = 1.0 / sq(st.sigma * 0.6744897501960817);
  rep.statistics["largest_is_marked_frequency"] = static_cast<double>(largest_marked) / static_cast<double>(cfg.reps);
  rep.statistics["identity_violations"] = identity_violations;
  rep.criteria.push_back(criterion_le("identity_violations", static_cast<double>(identity_violations), 0.0));

  if (st.c == 1) {
    rep.degenerate = true;
    return rep;
  }
  const double ks_rest = ks_one_sample(rest, tau_law(st.sigma));
  const double ks_tau = ks_one_sample(tau, tau_law(st.sigma));
  rep.statistics["ks_rest"] = ks_rest;
  rep.statistics["ks_tau"] = ks_tau;
  rep.criteria.push_back(criterion_le("ks_rest", ks_rest, 0.12));
  return rep;
}

ExperimentReport experiment_tree_sizes(const ExperimentConfig& cfg, const TreeSizesOptions& options) {
  if (options.top_j < 1) throw Error(Errc::InvalidArgument, "top_j must be at least 1");
  if (options.limit_reps == 0) throw Error(Errc::InvalidArgument, "limit_reps must be positive");
  const auto st = build(cfg);
  ExperimentReport rep;
  rep.name = "sizes";
  rep.parameters = base_parameters(cfg, st);
  rep.parameters["top_j"] = options.top_j;
  rep.parameters["limit_reps"] = options.limit_reps;
  rep.parameters["dt"] = options.dt;
  rep.parameters["t_cap"] = options.t_cap;
  if (st.c == 1) {
    rep.degenerate = true;
    return rep;
  }

  const auto runs = run_forests(cfg, st.s, {});
  const double scale = sq(static_cast<double>(st.c));
  std::vector<std::vector<double>> sizes(options.top_j, std::vector<double>(cfg.reps, 0.0));
  std::vector<double> sums(cfg.reps);
  std::size_t not_decreasing = 0;
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    const auto& ranked = runs[r].ranked_sizes;
    if (!std::is_sorted(ranked.rbegin(), ranked.rend())) ++not_decreasing;
    for (std::size_t i = 0; i < options.top_j && i + 1 < ranked.size(); ++i) {
      sizes[i][r] = static_cast<double>(ranked[i + 1]) / scale;
    }
    sums[r] = static_cast<double>(runs[r].n - ranked.front()) / scale;
  }

  LimitOptions lim;
  lim.top_j = options.top_j;
  lim.dt = options.dt;
  lim.t_cap = options.t_cap;
  lim.on_cap = CapPolicy::Censor;
  std::vector<LimitReplicate> limits(options.limit_reps);
  parallel_for(options.limit_reps, cfg.threads, [&](std::size_t r) {
    auto rng = replicate_stream(cfg.seed, kLimit, r);
    limits[r] = sample_limit_vector(st.sigma, rng, lim);
  });
  std::vector<std::vector<double>> lengths(options.top_j, std::vector<double>(options.limit_reps, 0.0));
  std::size_t censored = 0;
  for (std::size_t r = 0; r < options.limit_reps; ++r) {
    if (limits[r].censored) ++censored;
    for (std::size_t i = 0; i < limits[r].lengths.size(); ++i) lengths[i][r] = limits[r].lengths[i];
  }

  nlohmann::json ks = nlohmann::json::array();
  for (std::size_t i = 0; i < options.top_j; ++i) {
    const double d = ks_two_sample(sizes[i], lengths[i]);
    ks.push_back(d);
    if (i == 0) rep.criteria.push_back(criterion_le("ks_top1", d, 0.12));
  }
  rep.statistics["ks"] = ks;
  rep.statistics["limit_censored"] = censored;
  rep.statistics["mean_sum_scaled"] = mean(sums);
  rep.statistics["not_decreasing"] = not_decreasing;
  rep.criteria.push_back(criterion_le("not_decreasing", static_cast<double>(not_decreasing), 0.0));

  if (cfg.keep_raw) {
    rep.raw_header = {"replicate", "source"};
    for (std::size_t i = 0; i < options.top_j; ++i) rep.raw_header.push_back("size" + std::to_string(i + 1));
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      std::vector<double> row{static_cast<double>(r), 0.0};
      for (std::size_t i = 0; i < options.top_j; ++i) row.push_back(sizes[i][r]);
      rep.raw_rows.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < options.limit_reps; ++r) {
      std::vector<double> row{static_cast<double>(r), 1.0};
      for (std::size_t i = 0; i < options.top_j; ++i) row.push_back(lengths[i][r]);
      rep.raw_rows.push_back(std::move(row));
    }
  }
  return rep;
}

ExperimentReport experiment_walk(const ExperimentConfig& cfg, const std::vector<double>& t_points) {
  if (t_points.empty()) throw Error(Errc::InvalidArgument, "no time points");
  for (double t : t_points) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::InvalidArgument, "time points must be finite and nonnegative");
  }
  const auto st = build(cfg);
  ExperimentReport rep;
  rep.name = "walk";
  rep.parameters = base_parameters(cfg, st);
  rep.parameters["t_points"] = t_points;

  const double c = static_cast<double>(st.c);
  std::vector<std::size_t> steps;
  for (double t : t_points) {
    steps.push_back(std::min<std::size_t>(static_cast<std::size_t>(std::floor(t * c * c)), static_cast<std::size_t>(st.s.n())));
  }
  std::vector<std::size_t> sorted_steps = steps;
  std::sort(sorted_steps.begin(), sorted_steps.end());
  sorted_steps.erase(std::unique(sorted_steps.begin(), sorted_steps.end()), sorted_steps.end());
  const std::size_t horizon = sorted_steps.back();

  const DegreeVector base = degree_vector(st.s);
  // values[r][k] = S_{sorted_steps[k]} / cn
  std::vector<std::vector<double>> values(cfg.reps, std::vector<double>(sorted_steps.size()));
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
    auto rng = replicate_stream(cfg.seed, kShuffle, r);
    DegreeVector d = base;
    shuffle_prefix(d, horizon, rng);
    Level w = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j <= horizon && k < sorted_steps.size(); ++j) {
      if (j > 0) w += d[j - 1] - 1;
      while (k < sorted_steps.size() && sorted_steps[k] == j) values[r][k++] = static_cast<double>(w) / c;
    }
  });

  auto column = [&](std::size_t step) {
    const auto k = static_cast<std::size_t>(std::lower_bound(sorted_steps.begin(), sorted_steps.end(), step) - sorted_steps.begin());
    std::vector<double> col(cfg.reps);
    for (std::size_t r = 0; r < cfg.reps; ++r) col[r] = values[r][k];
    return col;
  };

  nlohmann::json per_t = nlohmann::json::array();
  std::optional<double> var1, var2;
  for (std::size_t i = 0; i < t_points.size(); ++i) {
    const double t = t_points[i];
    const auto col = column(steps[i]);
    nlohmann::json entry{{"t", t}, {"step", steps[i]}, {"mean", mean(col)}};
    if (cfg.reps >= 2) entry["variance"] = variance(col);
    if (t > 0.0) {
      const double sd = st.sigma * std::sqrt(t);
      const double ks = ks_one_sample(col, [sd](double x) { return normal_cdf(x / sd); });
      entry["ks"] = ks;
      entry["target_variance"] = sd * sd;
      rep.criteria.push_back(criterion_le("ks_t=" + fmt(t), ks, 0.06));
    } else {
      const bool zero = std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0; });
      entry["identically_zero"] = zero;
    }
    if (t == 1.0 && cfg.reps >= 2) var1 = variance(col);
    if (t == 2.0 && cfg.reps >= 2) var2 = variance(col);
    per_t.push_back(entry);
  }
  rep.statistics["per_t"] = per_t;
  if (var1 && var2 && *var1 > 0.0) {
    const double ratio = *var2 / *var1;
    rep.statistics["variance_ratio"] = ratio;
    rep.criteria.push_back(criterion_ge("variance_ratio_low", ratio, 1.7));
    rep.criteria.push_back(criterion_le("variance_ratio_high", ratio, 2.3));
  }

  // Correlation of increments over consecutive disjoint windows.
  if (sorted_steps.size() >= 2 && cfg.reps >= 3) {
    nlohmann::json corr = nlohmann::json::array();
    const double slack = 3.0 / std::sqrt(static_cast<double>(cfg.reps));
    for (std::size_t k = 1; k < sorted_steps.size(); ++k) {
      const auto cur = column(sorted_steps[k]);
      std::vector<double> inc(cfg.reps);
      for (std::size_t r = 0; r < cfg.reps; ++r) inc[r] = cur[r] - values[r][k - 1];
      std::vector<double> left(cfg.reps);
      for (std::size_t r = 0; r < cfg.reps; ++r) left[r] = k >= 2 ? values[r][k - 1] - values[r][k - 2] : values[r][k - 1];
      const double rho = correlation(left, inc);
      corr.push_back({{"from", sorted_steps[k - 1]}, {"to", sorted_steps[k]}, {"correlation", rho}});
      rep.criteria.push_back(criterion_le("increment_correlation_" + std::to_string(k), std::abs(rho), slack));
    }
    rep.statistics["increment_correlation"] = corr;
  }

  if (cfg.keep_raw) {
    rep.raw_header = {"replicate"};
    for (auto k : sorted_steps) rep.raw_header.push_back("S_" + std::to_string(k));
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      std::vector<double> row{static_cast<double>(r)};
      row.insert(row.end(), values[r].begin(), values[r].end());
      rep.raw_rows.push_back(std::move(row));
    }
  }
  return rep;
}

ExperimentReport experiment_degrees(const ExperimentConfig& cfg, const DegreesOptions& options) {
  if (options.trees.empty() || options.degrees.empty()) throw Error(Errc::InvalidArgument, "nothing to measure");
  for (auto l : options.trees) {
    if (l < 1) throw Error(Errc::InvalidArgument, "tree rank must be at least 1");
  }
  const auto st = build(cfg);
  ExperimentReport rep;
  rep.name = "degrees";
  rep.parameters = base_parameters(cfg, st);
  rep.parameters["degrees"] = options.degrees;
  rep.parameters["trees"] = options.trees;
  rep.parameters["delta"] = options.delta;
  rep.parameters["level"] = options.level;

  const std::size_t max_l = *std::max_element(options.trees.begin(), options.trees.end());
  WalkStatisticsOptions wopt;
  wopt.tree_dists = max_l;
  const auto runs = run_forests(cfg, st.s, wopt);
  const auto whole = empirical(st.s);
  auto prob = [](const EmpiricalDist& e, Degree i) {
    const auto it = e.probs.find(i);
    return it == e.probs.end() ? 0.0 : it->second;
  };

  nlohmann::json quantities = nlohmann::json::array();
  auto summarize = [&](const std::string& name, std::size_t l, const std::vector<double>& diffs, bool gated) {
    nlohmann::json q{{"name", name}, {"tree", l}, {"samples", diffs.size()}};
    if (diffs.empty()) {
      q["quantile"] = nullptr;
      quantities.push_back(q);
      return;
    }
    const double qv = quantile(diffs, options.level);
    const auto exceed = std::count_if(diffs.begin(), diffs.end(), [&](double v) { return v > options.delta; });
    q["quantile"] = qv;
    q["max"] = *std::max_element(diffs.begin(), diffs.end());
    q["exceed_fraction"] = static_cast<double>(exceed) / static_cast<double>(diffs.size());
    quantities.push_back(q);
    if (gated && l == 1) rep.criteria.push_back(criterion_le(name + "_l1_quantile", qv, options.delta));
  };

  for (auto l : options.trees) {
    for (auto i : options.degrees) {
      std::vector<double> diffs;
      for (const auto& w : runs) {
        if (w.tree_dists.size() >= l) diffs.push_back(std::abs(prob(w.tree_dists[l - 1], i) - prob(whole, i)));
      }
      summarize("p" + std::to_string(i), l, diffs, true);
    }
    std::vector<double> diffs;
    for (const auto& w : runs) {
      if (w.tree_dists.size() >= l) diffs.push_back(std::abs(w.tree_dists[l - 1].second_moment - whole.second_moment));
    }
    summarize("sigma2", l, diffs, false);
  }
  rep.statistics["quantities"] = quantities;
  rep.statistics["sigma2_whole"] = whole.second_moment;
  if (st.c < static_cast<Count>(max_l)) rep.degenerate = true;
  return rep;
}

ExperimentReport experiment_degrees_trend(const ExperimentConfig& cfg, const std::vector<Count>& ns,
                                          const DegreesOptions& options) {
  if (ns.size() < 2) throw Error(Errc::InvalidArgument, "trend needs at least two sizes");
  ExperimentReport rep;
  rep.name = "degrees_trend";
  std::vector<ExperimentReport> parts;
  for (Count n : ns) {
    ExperimentConfig c = cfg;
    c.n = n;
    if (!cfg.cn) c.cn.reset();
    parts.push_back(experiment_degrees(c, options));
  }
  rep.parameters = {{"law", cfg.law}, {"ns", ns}, {"cn_exponent", cfg.cn_exponent}, {"reps", cfg.reps}, {"seed", cfg.seed}};
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& p : parts) {
    nlohmann::json j;
    to_json(j, p);
    runs.push_back(j);
  }
  rep.statistics["runs"] = runs;

  const auto& first = parts.front().statistics["quantities"];
  const auto& last = parts.back().statistics["quantities"];
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (first[k]["quantile"].is_null() || last[k]["quantile"].is_null()) continue;
    const std::string name = first[k]["name"].get<std::string>() + "_l" + std::to_string(first[k]["tree"].get<std::size_t>());
    const double a = first[k]["quantile"].get<double>();
    const double b = last[k]["quantile"].get<double>();
    Criterion cr{name + "_decreases", b, a, "<", b < a || (a == 0.0 && b == 0.0)};
    rep.criteria.push_back(cr);
  }
  for (const auto& c : parts.back().criteria) rep.criteria.push_back(c);
  return rep;
}

ExperimentReport experiment_largest_marked(const ExperimentConfig& cfg) {
  const auto st = build(cfg);
  ExperimentReport rep;
  rep.name = "largest";
  rep.parameters = base_parameters(cfg, st);
  const auto runs = run_forests(cfg, st.s, {});
  std::size_t hits = 0;
  double marked_fraction = 0.0;
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    const auto& w = runs[r];
    if (w.largest_is_marked) ++hits;
    marked_fraction += static_cast<double>(w.sizes[w.marked_index]) / static_cast<double>(w.n);
    if (cfg.keep_raw) {
      rep.raw_rows.push_back({static_cast<double>(r), w.largest_is_marked ? 1.0 : 0.0,
                              static_cast<double>(w.ranked_sizes.front()), static_cast<double>(w.sizes[w.marked_index])});
    }
  }
  rep.raw_header = {"replicate", "largest_is_marked", "largest_size", "marked_size"};
  const double freq = static_cast<double>(hits) / static_cast<double>(cfg.reps);
  const double hw = binomial_halfwidth(freq, cfg.reps);
  rep.statistics["frequency"] = freq;
  rep.statistics["ci95"] = {std::max(0.0, freq - hw), std::min(1.0, freq + hw)};
  // P(marked tree is T_1) = E|T_1|/n; the mean marked-tree share estimates E|T_M|/n >= that.
  rep.statistics["mean_marked_share"] = marked_fraction / static_cast<double>(cfg.reps);
  rep.degenerate = st.c == 1;
  rep.criteria.push_back(criterion_ge("frequency", freq, 0.95));
  return rep;
}

ExperimentReport experiment_concentration(const ExperimentConfig& cfg, Degree degree,
                                          const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw Error(Errc::InvalidArgument, "no thresholds");
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw Error(Errc::InvalidArgument, "thresholds must lie in (0,1)");
  }
  const auto st = build(cfg);
  ExperimentReport rep;
  rep.name = "concentration";
  rep.parameters = base_parameters(cfg, st);
  rep.parameters["degree"] = degree;
  rep.parameters["thresholds"] = thresholds;

  const DegreeVector base = degree_vector(st.s);
  const auto n = base.size();
  const auto cn = static_cast<std::size_t>(st.c);
  const double p = static_cast<double>(st.s.count(degree)) / static_cast<double>(n);
  std::vector<double> sup(cfg.reps);
  std::vector<char> endpoint_ok(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
    auto rng = replicate_stream(cfg.seed, kShuffle, r);
    DegreeVector d = base;
    shuffle_prefix(d, n, rng);
    std::size_t q = 0;
    double best = 0.0;
    for (std::size_t x = 1; x <= n; ++x) {
      if (d[x - 1] == degree) ++q;
      if (x > cn) best = std::max(best, std::abs(p - static_cast<double>(q) / static_cast<double>(x)));
    }
    sup[r] = best;
    endpoint_ok[r] = static_cast<Count>(q) == st.s.count(degree);
  });

  const auto bad_endpoints = std::count(endpoint_ok.begin(), endpoint_ok.end(), 0);
  rep.statistics["endpoint_violations"] = bad_endpoints;
  rep.criteria.push_back(criterion_le("endpoint_violations", static_cast<double>(bad_endpoints), 0.0));
  rep.statistics["p"] = p;
  rep.statistics["mean_sup"] = mean(sup);
  rep.statistics["max_sup"] = *std::max_element(sup.begin(), sup.end());
  nlohmann::json per_t = nlohmann::json::array();
  const double reps = static_cast<double>(cfg.reps);
  for (double t : thresholds) {
    const auto hits = std::count_if(sup.begin(), sup.end(), [t](double v) { return v >= t; });
    const double freq = static_cast<double>(hits) / reps;
    const double bound = std::exp(-3.0 * t * t * static_cast<double>(cn) / 5.0);
    const double allowed = bound + 3.0 * std::sqrt(bound / reps);
    per_t.push_back({{"t", t}, {"exceedance", freq}, {"bound", bound}, {"allowed", allowed}});
    rep.criteria.push_back(criterion_le("exceedance_t=" + fmt(t), freq, allowed));
  }
  rep.statistics["per_t"] = per_t;
  if (cfg.keep_raw) {
    rep.raw_header = {"replicate", "sup_deviation"};
    for (std::size_t r = 0; r < cfg.reps; ++r) rep.raw_rows.push_back({static_cast<double>(r), sup[r]});
  }
  return rep;
}

ExperimentReport experiment_dt_halving(const DtHalvingOptions& options) {
  if (options.reps == 0) throw Error(Errc::InvalidArgument, "reps must be positive");
  if (!(options.sigma > 0.0) || !(options.dt > 0.0)) throw Error(Errc::InvalidArgument, "sigma and dt must be positive");
  ExperimentReport rep;
  rep.name = "dt_halving";
  rep.parameters = {{"sigma", options.sigma}, {"dt", options.dt}, {"t_cap", options.t_cap},
                    {"reps", options.reps},   {"seed", options.seed}};
  const double x = 1.0 / options.sigma;
  const double fine_dt = options.dt / 2.0;
  const double step = std::sqrt(fine_dt);
  const auto max_fine = static_cast<std::size_t>(std::floor(options.t_cap / fine_dt));

  std::vector<double> coarse_top(options.reps, 0.0);
  std::vector<double> fine_top(options.reps, 0.0);
  std::vector<char> censored(options.reps, 0);
  parallel_for(options.reps, options.threads, [&](std::size_t r) {
    auto rng = replicate_stream(options.seed, kBrownian, r);
    ExcursionTracker fine(x, fine_dt);
    ExcursionTracker coarse(x, options.dt);
    double b = 0.0;
    std::size_t k = 0;
    while ((!fine.done() || !coarse.done()) && k < max_fine) {
      b += step * rng.normal();
      ++k;
      if (!fine.done()) fine.feed(b);
      if (k % 2 == 0 && !coarse.done()) coarse.feed(b);
    }
    if (!fine.done()) fine.censor();
    if (!coarse.done()) coarse.censor();
    censored[r] = !fine.done() || !coarse.done();
    const auto f = fine.ranked();
    const auto c = coarse.ranked();
    fine_top[r] = f.empty() ? 0.0 : f.front().length();
    coarse_top[r] = c.empty() ? 0.0 : c.front().length();
  });
  const double d = ks_two_sample(coarse_top, fine_top);
  rep.statistics["ks"] = d;
  rep.statistics["censored"] = std::count(censored.begin(), censored.end(), 1);
  rep.statistics["median_top1_coarse"] = quantile(coarse_top, 0.5);
  rep.statistics["median_top1_fine"] = quantile(fine_top, 0.5);
  rep.criteria.push_back(criterion_le("ks_halving", d, 0.02));
  return rep;
}

ExperimentReport experiment_tau_exact(double sigma, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(Errc::InvalidArgument, "count must be positive");
  ExperimentReport rep;
  rep.name = "tau_exact";
  rep.parameters = {{"sigma", sigma}, {"count", count}, {"seed", seed}};
  auto rng = replicate_stream(seed, kExact, 0);
  std::vector<double> samples(count);
  for (auto& v : samples) v = sample_tau_exact(sigma, rng);
  const double d = ks_one_sample(samples, tau_law(sigma));
  rep.statistics["ks"] = d;
  rep.criteria.push_back(criterion_le("ks_exact", d, 0.01));
  return rep;
}

}  // namespace pforest
