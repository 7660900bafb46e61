#include "pforest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pforest/degseq.hpp"
#include "pforest/error.hpp"
#include "pforest/forest_codec.hpp"
#include "pforest/lattice_paths.hpp"
#include "pforest/limit_sim.hpp"
#include "pforest/sampler.hpp"
#include "pforest/verify.hpp"

namespace pforest::cli {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidArgument, std::string("cannot parse ") + what + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(Errc::InvalidArgument, "cannot write " + path);
    }
    os_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void emit(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

struct DegseqInput {
  std::string counts;
  std::string file;

  void add(CLI::App* app) {
    app->add_option("--counts", counts, "Degree counts as JSON, e.g. '{\"0\":3,\"2\":1}'");
    app->add_option("--degseq", file, "Degree sequence JSON file");
  }
  DegreeSequence load() const {
    if (counts.empty() == file.empty()) throw Error(Errc::InvalidArgument, "give exactly one of --counts or --degseq");
    const auto j = counts.empty() ? parse_json(read_file(file), "degree sequence") : parse_json(counts, "--counts");
    return degree_sequence_from_json(j);
  }
};

Count resolve_cn(Count n, std::optional<Count> cn, double exponent) {
  return cn ? *cn : cn_from_exponent(n, exponent);
}

json levels_json(const LatticePath& p) {
  json j;
  to_json(j, p);
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random plane forests with a prescribed degree sequence", "pforest"};
  app.require_subcommand(1);
  app.allow_extras(false);

  int status = kOk;
  std::function<void()> action;

  // degseq
  auto* degseq = app.add_subcommand("degseq", "Validate or generate degree sequences");
  degseq->require_subcommand(1);
  DegseqInput check_in;
  auto* check = degseq->add_subcommand("check", "Validate a degree sequence and print its summary");
  check_in.add(check);
  check->callback([&] {
    action = [&] {
      const auto s = check_in.load();
      const auto e = empirical(s);
      json j;
      to_json(j, s);
      j["n"] = s.n();
      j["c"] = s.c();
      j["sigma"] = limit_sigma(s);
      j["second_moment"] = e.second_moment;
      j["forests"] = count_forests(s).str();
      j["mcfs"] = count_mcf(s).str();
      emit(out, j);
    };
  });

  std::string make_law = "geometric:0.5";
  Count make_n = 0;
  std::optional<Count> make_cn;
  double make_exp = 0.35;
  std::uint64_t make_seed = 1;
  std::string make_out;
  auto* make = degseq->add_subcommand("make", "Build a degree sequence close to n times an offspring law");
  make->add_option("--p", make_law, "geometric:q | poisson:lambda | weights:p0,p1,...");
  make->add_option("--n", make_n, "Number of nodes")->required();
  auto* make_cn_opt = make->add_option("--cn", make_cn, "Number of trees");
  make->add_option("--cn-exp", make_exp, "Number of trees as floor(n^x)")->excludes(make_cn_opt);
  make->add_option("--seed", make_seed, "Seed (recorded only)");
  make->add_option("--out", make_out, "Output file");
  make->callback([&] {
    action = [&] {
      const auto s = make_degree_sequence(OffspringLaw::parse(make_law), make_n, resolve_cn(make_n, make_cn, make_exp), make_seed);
      json j;
      to_json(j, s);
      j["seed"] = make_seed;
      j["law"] = make_law;
      Output o(make_out, out);
      emit(*o, j);
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "Draw uniform forests or marked cyclic forests");
  sample->require_subcommand(1);
  DegseqInput sample_in;
  std::uint64_t sample_seed = 1;
  std::size_t sample_count = 1;
  std::string sample_out;
  std::string sample_format = "json";
  for (const char* kind : {"forest", "mcf"}) {
    auto* sub = sample->add_subcommand(kind, std::string("Sample ") + (kind == std::string("mcf") ? "marked cyclic forests" : "plane forests"));
    sample_in.add(sub);
    sub->add_option("--seed", sample_seed, "Seed");
    sub->add_option("--count", sample_count, "Number of samples")->check(CLI::PositiveNumber);
    sub->add_option("--out", sample_out, "Output file");
    sub->add_option("--format", sample_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    const bool mcf = kind == std::string("mcf");
    sub->callback([&, mcf] {
      action = [&, mcf] {
        const auto s = sample_in.load();
        Output o(sample_out, out);
        const auto c = static_cast<std::size_t>(s.c());
        if (sample_format == "csv") {
          *o << "seed,replicate,tau_n";
          for (std::size_t i = 1; i <= c; ++i) *o << ",size_" << i;
          *o << ",largest_is_marked\n";
        }
        for (std::size_t i = 0; i < sample_count; ++i) {
          auto rng = SeededRng::substream(sample_seed, i);
          json j;
          PlaneForest forest;
          NodeId mark;
          std::size_t tau_n = 0;
          if (mcf) {
            const auto m = sample_mcf(s, rng);
            to_json(j, m);
            forest = m.forest();
            mark = m.mark();
            tau_n = forest.size() - forest.trees.back().size();
          } else {
            const auto sf = sample_marked_forest(s, rng);
            to_json(j, sf.forest.forest);
            forest = sf.forest.forest;
            mark = sf.forest.mark;
            tau_n = forest.size() - sf.mcf.forest().trees.back().size();
          }
          if (sample_format == "csv") {
            const auto ranked = ranked_trees(forest);
            *o << sample_seed << ',' << i << ',' << tau_n;
            for (auto sz : ranked.sizes) *o << ',' << sz;
            *o << ',' << (ranked.order.front() == mark.tree ? 1 : 0) << '\n';
          } else {
            j["seed"] = sample_seed;
            j["replicate"] = i;
            *o << j.dump() << '\n';
          }
        }
      };
    });
  }

  // codec
  auto* codec = app.add_subcommand("codec", "Convert between trees, forests and lattice paths");
  codec->require_subcommand(1);
  std::string enc_tree, enc_forest, enc_mcf;
  std::optional<std::size_t> enc_mark;
  auto* encode = codec->add_subcommand("encode", "Tree, marked tree, forest or MCF to its path");
  auto* et = encode->add_option("--tree", enc_tree, "Lex degree list, e.g. '[2,0,0]'");
  encode->add_option("--mark", enc_mark, "0-based lex index of the mark (with --tree)")->needs(et);
  auto* ef = encode->add_option("--forest", enc_forest, "Forest JSON {\"trees\": [...]}")->excludes(et);
  encode->add_option("--mcf", enc_mcf, "Marked cyclic forest JSON")->excludes(et)->excludes(ef);
  encode->callback([&] {
    action = [&] {
      json j;
      if (!enc_tree.empty()) {
        PlaneTree t(parse_json(enc_tree, "--tree").get<std::vector<Degree>>());
        if (enc_mark) {
          j["bridge"] = levels_json(bridge_from_marked_tree({t, *enc_mark}));
        } else {
          j["bridge"] = levels_json(dfw_encode(t));
        }
      } else if (!enc_forest.empty()) {
        j["walk"] = levels_json(walk_from_forest(forest_from_json(parse_json(enc_forest, "--forest"))));
      } else if (!enc_mcf.empty()) {
        j["walk"] = levels_json(walk_from_mcf(mcf_from_json(parse_json(enc_mcf, "--mcf"))));
      } else {
        throw Error(Errc::InvalidArgument, "give one of --tree, --forest or --mcf");
      }
      emit(out, j);
    };
  });

  std::string dec_bridge, dec_walk;
  bool dec_forest = false;
  auto* decode = codec->add_subcommand("decode", "Path to tree, marked tree, forest or MCF");
  auto* db = decode->add_option("--bridge", dec_bridge, "First-passage bridge (tree) or lattice bridge (marked tree)");
  decode->add_option("--walk", dec_walk, "Coding walk (marked cyclic forest)")->excludes(db);
  decode->add_flag("--forest", dec_forest, "With --walk: decode the unmarked forest");
  decode->callback([&] {
    action = [&] {
      json j;
      if (!dec_bridge.empty()) {
        const auto levels = levels_from_json(parse_json(dec_bridge, "--bridge"));
        if (is_first_passage(levels)) {
          to_json(j["tree"], dfw_decode(FirstPassageBridge(levels)));
        } else {
          const auto m = marked_tree_from_bridge(LatticeBridge(levels));
          to_json(j["tree"], m.tree);
          j["mark"] = m.mark;
        }
      } else if (!dec_walk.empty()) {
        const CodingWalk w(levels_from_json(parse_json(dec_walk, "--walk")));
        if (dec_forest) {
          to_json(j, forest_from_walk(w));
        } else {
          to_json(j, mcf_from_walk(w));
        }
      } else {
        throw Error(Errc::InvalidArgument, "give --bridge or --walk");
      }
      emit(out, j);
    };
  });

  std::string rot_bridge;
  std::optional<std::size_t> rot_k;
  auto* rotate = codec->add_subcommand("rotate", "Cyclic shift of a bridge (default: the first-passage shift)");
  rotate->add_option("--bridge", rot_bridge, "Lattice bridge")->required();
  rotate->add_option("--k", rot_k, "Shift in 1..n");
  rotate->callback([&] {
    action = [&] {
      const LatticeBridge b(levels_from_json(parse_json(rot_bridge, "--bridge")));
      const std::size_t r = rotation_index(b);
      const std::size_t k = rot_k.value_or(r);
      const auto shifted = cyclic_shift(b, k);
      emit(out, json{{"rotation_index", r}, {"k", k}, {"bridge", levels_json(shifted)},
                     {"first_passage", is_first_passage(shifted)}});
    };
  });

  std::string split_walk;
  auto* split = codec->add_subcommand("split", "Split a coding walk at its first passages");
  split->add_option("--walk", split_walk, "Coding walk")->required();
  split->callback([&] {
    action = [&] {
      const CodingWalk w(levels_from_json(parse_json(split_walk, "--walk")));
      json segs = json::array();
      for (const auto& b : split_at_passage_times(w)) segs.push_back(levels_json(b));
      emit(out, json{{"passage_times", passage_times(w)}, {"segments", segs}});
    };
  });

  // limit
  auto* limit = app.add_subcommand("limit", "Brownian limit objects");
  limit->require_subcommand(1);
  double lim_sigma = 1.0;
  std::size_t lim_count = 1000;
  std::uint64_t lim_seed = 1;
  std::string lim_out;
  auto* stau = limit->add_subcommand("sample-tau", "Exact draws of the hitting time of -1/sigma");
  stau->add_option("--sigma", lim_sigma, "Brownian scale")->check(CLI::PositiveNumber);
  stau->add_option("--count", lim_count, "Number of samples")->check(CLI::PositiveNumber);
  stau->add_option("--seed", lim_seed, "Seed");
  stau->add_option("--out", lim_out, "Output CSV file");
  stau->callback([&] {
    action = [&] {
      SeededRng rng(lim_seed);
      Output o(lim_out, out);
      *o << "seed,index,tau\n";
      for (std::size_t i = 0; i < lim_count; ++i) {
        json v = sample_tau_exact(lim_sigma, rng);
        *o << lim_seed << ',' << i << ',' << v.dump() << '\n';
      }
    };
  });

  double exc_dt = 1e-4;
  double exc_cap = 200.0;
  std::size_t exc_top = 1;
  std::size_t exc_count = 1;
  auto* exc = limit->add_subcommand("excursions", "Ranked excursion intervals of reflected Brownian motion");
  exc->add_option("--sigma", lim_sigma, "Brownian scale")->check(CLI::PositiveNumber);
  exc->add_option("--dt", exc_dt, "Grid step")->check(CLI::PositiveNumber);
  exc->add_option("--top", exc_top, "Number of ranked excursions")->check(CLI::PositiveNumber);
  exc->add_option("--count", exc_count, "Number of replicates")->check(CLI::PositiveNumber);
  exc->add_option("--t-cap", exc_cap, "Censoring time")->check(CLI::PositiveNumber);
  exc->add_option("--seed", lim_seed, "Seed");
  exc->add_option("--out", lim_out, "Output file");
  exc->callback([&] {
    action = [&] {
      LimitOptions opt;
      opt.top_j = exc_top;
      opt.dt = exc_dt;
      opt.t_cap = exc_cap;
      opt.on_cap = CapPolicy::Censor;
      json reps = json::array();
      for (std::size_t i = 0; i < exc_count; ++i) {
        auto rng = SeededRng::substream(lim_seed, i);
        json j;
        to_json(j, sample_limit_vector(lim_sigma, rng, opt));
        reps.push_back(j);
      }
      Output o(lim_out, out);
      emit(*o, json{{"seed", lim_seed}, {"sigma", lim_sigma}, {"dt", exc_dt}, {"t_cap", exc_cap}, {"replicates", reps}});
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Monte Carlo experiments");
  verify->require_subcommand(1);
  ExperimentConfig cfg;
  std::optional<Count> v_cn;
  std::string v_out, v_raw;
  std::size_t v_top = 1;
  std::size_t v_limit_reps = 3000;
  double v_dt = 1e-4;
  double v_cap = 200.0;
  std::vector<double> v_t;
  std::optional<Count> v_compare_n;
  Degree v_degree = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.law, "Offspring law");
    sub->add_option("--n", cfg.n, "Number of nodes")->check(CLI::PositiveNumber);
    auto* cn = sub->add_option("--cn", v_cn, "Number of trees");
    sub->add_option("--cn-exp", cfg.cn_exponent, "Number of trees as floor(n^x)")->excludes(cn);
    sub->add_option("--reps", cfg.reps, "Replicates")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)");
    sub->add_option("--out", v_out, "Report JSON file");
    sub->add_option("--raw", v_raw, "Raw per-replicate CSV file");
  };
  auto finish = [&](const ExperimentReport& rep, std::chrono::steady_clock::time_point start) {
    {
      Output o(v_out, out);
      json j;
      to_json(j, rep);
      emit(*o, j);
    }
    if (!v_raw.empty()) {
      Output o(v_raw, out);
      write_raw_csv(*o, rep);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << rep.name << ": " << (rep.passed() ? "passed" : "FAILED") << " in " << secs << " s\n";
    for (const auto& c : rep.criteria) {
      if (!c.passed) err << "  " << c.name << " = " << c.value << " (needs " << c.relation << ' ' << c.threshold << ")\n";
    }
    status = rep.passed() ? kOk : kCriterionFailed;
  };
  auto experiment = [&](const char* name, const char* help, std::function<ExperimentReport()> body) {
    auto* sub = verify->add_subcommand(name, help);
    add_common(sub);
    sub->callback([&, body] {
      action = [&, body] {
        cfg.cn = v_cn;
        cfg.keep_raw = !v_raw.empty();
        const auto start = std::chrono::steady_clock::now();
        finish(body(), start);
      };
    });
    return sub;
  };
  experiment("tau", "Law of (n - |T_1|)/cn^2", [&] { return experiment_tau(cfg); });
  auto* vs = experiment("sizes", "Ranked small-tree sizes against excursion lengths", [&] {
    return experiment_tree_sizes(cfg, {v_top, v_limit_reps, v_dt, v_cap});
  });
  vs->add_option("--top", v_top, "Number of ranked sizes")->check(CLI::PositiveNumber);
  vs->add_option("--limit-reps", v_limit_reps, "Limit replicates")->check(CLI::PositiveNumber);
  vs->add_option("--dt", v_dt, "Grid step of the limit simulation")->check(CLI::PositiveNumber);
  vs->add_option("--t-cap", v_cap, "Censoring time of the limit simulation")->check(CLI::PositiveNumber);
  auto* vw = experiment("walk", "Rescaled shuffled walk against Brownian marginals", [&] {
    return v_t.empty() ? experiment_walk(cfg) : experiment_walk(cfg, v_t);
  });
  vw->add_option("--t", v_t, "Time points");
  auto* vd = experiment("degrees", "Degree distributions of the largest trees", [&] {
    if (v_compare_n) return experiment_degrees_trend(cfg, {*v_compare_n, cfg.n});
    return experiment_degrees(cfg);
  });
  vd->add_option("--compare-n", v_compare_n, "Also run at this smaller n and check the quantiles decrease");
  experiment("largest", "Frequency of the marked tree being the largest", [&] { return experiment_largest_marked(cfg); });
  std::vector<double> v_thresholds{0.3, 0.5};
  auto* vc = experiment("concentration", "Deviation of prefix degree frequencies", [&] {
    return experiment_concentration(cfg, v_degree, v_thresholds);
  });
  vc->add_option("--degree", v_degree, "Degree i");
  vc->add_option("--thresholds", v_thresholds, "Thresholds in (0,1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kInvalid;
  }

  try {
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const json::exception& e) {
    err << "error: InvalidArgument: " << e.what() << '\n';
    return kInvalid;
  }
  return status;
}

}  // namespace pforest::cli
