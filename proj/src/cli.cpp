#include "errw/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <algorithm>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "errw/env_estimate.hpp"
#include "errw/exact.hpp"
#include "errw/gibbs.hpp"
#include "errw/harness.hpp"
#include "errw/io.hpp"
#include "errw/replicas.hpp"

namespace errw::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "errw-lab 1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string preset = "segment-2";
  std::string tree_file;
  std::string depth;
  std::optional<long> v_start;
  std::vector<long> rung;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string config;
};

struct Options {
  Common common;
  std::string a = "";
  std::vector<std::string> a_list;
  std::uint64_t steps = 0;
  std::uint64_t replicas = 0;
  bool keep_path = false;
  int max_length = 0;
  std::uint64_t cap = 5'000'000;
  std::vector<std::uint64_t> times;
  std::uint64_t min_count = 30;
  double r2_min = 0.0;
  double ratio_max = 3.0;
  std::size_t bootstrap = 0;
  std::string sample;
  int exceed_from = 3;
  int exceed_to = 15;
  int level = 0;
  std::vector<double> thresholds;
  int rho_length = 2;
  std::vector<int> depths;
  bool baseline = true;
  std::size_t environments = 100;
  double eps = 1e-8;
  std::string spec;
  int max_n = 4;
};

/// Turns a JSON config into command-line tokens for every key that the
/// command line does not already set.
std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& given) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const std::exception& e) {
    throw ConfigError("cannot load config " + path + ": " + e.what());
  }
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw ConfigError("config " + path + " is not a JSON object");
  std::set<std::string> present;
  for (const auto& g : given) {
    if (g.rfind("--", 0) == 0) present.insert(g.substr(2, g.find('=') == std::string::npos ? std::string::npos : g.find('=') - 2));
  }
  auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    if (key == "config" || present.count(key)) continue;
    if (value.is_boolean()) {
      tokens.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      if (value.empty()) continue;
      tokens.push_back("--" + key);
      for (const auto& v : value) tokens.push_back(scalar(v));
    } else if (!value.is_null()) {
      tokens.push_back("--" + key);
      tokens.push_back(scalar(value));
    }
  }
  return tokens;
}

std::shared_ptr<const LadderGraph> make_ladder(const Common& c, int default_depth) {
  try {
    FiniteTree tree = c.tree_file.empty() ? tree_preset(c.preset) : tree_from_file(c.tree_file);
    std::optional<int> depth = default_depth;
    if (c.depth == "unbounded") {
      depth.reset();
    } else if (!c.depth.empty()) {
      std::size_t pos = 0;
      depth = std::stoi(c.depth, &pos);
      if (pos != c.depth.size()) throw std::invalid_argument("bad depth '" + c.depth + "'");
    }
    std::optional<int> start, rung;
    if (c.v_start) start = tree.index_of(*c.v_start);
    if (!c.rung.empty()) {
      if (c.rung.size() != 2) throw std::invalid_argument("--rung takes two tree vertex labels");
      const int a = tree.index_of(c.rung[0]), b = tree.index_of(c.rung[1]);
      for (int e = 0; e < tree.edge_count(); ++e) {
        const auto [u, v] = tree.edges()[e];
        if ((u == a && v == b) || (u == b && v == a)) rung = e;
      }
      if (!rung) throw std::invalid_argument("--rung is not a tree edge");
    }
    return std::make_shared<const LadderGraph>(std::move(tree), depth, start, rung);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("ladder: ") + e.what());
  }
}

void check_a(const std::string& a) {
  try {
    if (parse_rational(a) <= 0) throw std::invalid_argument("must be positive");
  } catch (const std::exception& e) {
    throw ConfigError("--a '" + a + "': " + e.what());
  }
}

template <class T>
T or_default(const T& v, const T& fallback) {
  return v == T{} ? fallback : v;
}

EnvironmentSample obtain_sample(const Options& o, const std::shared_ptr<const LadderGraph>& ladder,
                                std::uint64_t default_steps, std::uint64_t default_replicas) {
  if (!o.sample.empty()) {
    try {
      return load_sample(o.sample);
    } catch (const std::exception& e) {
      throw ConfigError("--sample " + o.sample + ": " + e.what());
    }
  }
  if (o.a.empty()) throw ConfigError("--a is required unless --sample is given");
  check_a(o.a);
  return sample_environments(ladder, o.a, or_default(o.steps, default_steps),
                             or_default(o.replicas, default_replicas), o.common.seed, o.common.threads);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config; flags override its keys");
  sub->add_option("--preset", c.preset, "segment-k, path-k or star-k")->capture_default_str();
  sub->add_option("--tree", c.tree_file, "tree JSON file {\"vertices\": [...], \"edges\": [[u, v], ...]}");
  sub->add_option("--depth", c.depth, "ladder depth or 'unbounded'");
  sub->add_option("--v-start", c.v_start, "label of the start tree vertex");
  sub->add_option("--rung", c.rung, "labels of the reference rung's tree edge")->expected(2);
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--out", c.out, "output directory (default $ERRW_OUTPUT_DIR or errw_out)");
}

json option_echo(const CLI::App* sub) {
  json j;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames()[0];
    if (name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (opt->get_expected_max() > 1) {
        j[name] = r;
      } else {
        j[name] = r.empty() ? std::string() : r.back();
      }
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> args = args_in;
  if (args.empty()) args.push_back("errw_lab");

  // Config file keys become tokens placed before the user's own flags.
  try {
    for (std::size_t i = 2; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (!path.empty()) {
        const std::vector<std::string> given(args.begin() + 2, args.end());
        auto tokens = config_tokens(path, given);
        args.insert(args.begin() + 2, tokens.begin(), tokens.end());
        break;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Edge-reinforced random walk laboratory"};
  app.require_subcommand(1);
  // Each subcommand binds its own Options so defaults never leak across them.
  std::map<std::string, Options> store;
  Options* op = nullptr;
  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    op = &store[name];
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, op->common);
    subs[name] = s;
    return s;
  };
  auto req_a = [&](CLI::App* s) { s->add_option("--a", op->a, "initial edge weight, rational (\"3/4\")")->required(); };
  auto opt_a = [&](CLI::App* s) { s->add_option("--a", op->a, "initial edge weight, rational (\"3/4\")"); };
  auto sample_opts = [&](CLI::App* s, std::uint64_t steps, std::uint64_t reps) {
    opt_a(s);
    s->add_option("--sample", op->sample, "environment sample directory written by 'environments'");
    s->add_option("--steps", op->steps, "steps per replica (default " + std::to_string(steps) + ")");
    s->add_option("--replicas", op->replicas, "replicas (default " + std::to_string(reps) + ")");
  };

  CLI::App* s_sim = sub("simulate", "run reinforced walks and write replica summaries");
  req_a(s_sim);
  s_sim->add_option("--steps", op->steps, "steps per replica")->required();
  s_sim->add_option("--replicas", op->replicas, "replicas")->default_val(1);
  s_sim->add_flag("--keep-path", op->keep_path, "also write full trajectories");

  CLI::App* s_exch = sub("exchangeability", "exact partial exchangeability check");
  s_exch->add_option("--a", op->a_list, "one or more rational initial weights")->required();
  s_exch->add_option("--max-length", op->max_length, "longest path length")->default_val(8);
  s_exch->add_option("--cap", op->cap, "path enumeration cap")->capture_default_str();

  CLI::App* s_tails = sub("tails", "survival of |X_t| at several times");
  req_a(s_tails);
  s_tails->add_option("--t", op->times, "times")->default_val(std::vector<std::uint64_t>{10000, 100000});
  s_tails->add_option("--replicas", op->replicas, "replicas")->default_val(10000);
  s_tails->add_option("--min-count", op->min_count, "minimum hits per fitted bin")->default_val(30);
  s_tails->add_option("--r2-min", op->r2_min, "R^2 threshold")->default_val(0.9);

  CLI::App* s_range = sub("range", "median running maximum level against ln t");
  req_a(s_range);
  s_range->add_option("--t", op->times, "times")->default_val(std::vector<std::uint64_t>{1000, 10000, 100000});
  s_range->add_option("--replicas", op->replicas, "replicas")->default_val(10000);
  s_range->add_option("--ratio-max", op->ratio_max, "largest accepted median ratio")->default_val(3.0);

  CLI::App* s_eq = sub("equilibrium", "annealed laws of X_2t and X_2t+1");
  req_a(s_eq);
  s_eq->add_option("--t", op->times, "half times t")->default_val(std::vector<std::uint64_t>{100, 1000, 10000, 100000});
  s_eq->add_option("--replicas", op->replicas, "replicas")->default_val(10000);
  s_eq->add_option("--bootstrap", op->bootstrap, "noise-floor resamples")->default_val(200);

  CLI::App* s_env = sub("environments", "estimate environments from occupation fractions");
  req_a(s_env);
  s_env->add_option("--steps", op->steps, "steps per replica")->default_val(1000000);
  s_env->add_option("--replicas", op->replicas, "replicas")->default_val(1000);

  CLI::App* s_decay = sub("decay", "decay profile of reference-normalized weights");
  sample_opts(s_decay, 1000000, 1000);
  s_decay->add_option("--min-count", op->min_count, "positive samples per fitted level")->default_val(30);
  s_decay->add_option("--bootstrap", op->bootstrap, "bootstrap replicates")->default_val(400);
  s_decay->add_option("--exceed-from", op->exceed_from, "first exceedance level")->default_val(3);
  s_decay->add_option("--exceed-to", op->exceed_to, "last exceedance level")->default_val(15);

  CLI::App* s_lr = sub("logratio", "tail of |ln(x_e / x_f)| for adjacent rungs");
  sample_opts(s_lr, 1000000, 1000);
  s_lr->add_option("--level", op->level, "level of the first rung")->default_val(0);
  s_lr->add_option("--thresholds", op->thresholds, "thresholds M (default 0, 0.25, ..., 6)");
  s_lr->add_option("--min-count", op->min_count, "minimum hits per fitted bin")->default_val(30);
  s_lr->add_option("--r2-min", op->r2_min, "R^2 threshold")->default_val(0.85);

  CLI::App* s_mix = sub("mixture", "exact path laws against environment averages");
  sample_opts(s_mix, 1000000, 1000);
  s_mix->add_option("--max-length", op->max_length, "longest path")->default_val(3);
  s_mix->add_option("--rho-length", op->rho_length, "longest continuation for the conditional check")->default_val(2);
  s_mix->add_option("--bootstrap", op->bootstrap, "bootstrap replicates")->default_val(2000);

  CLI::App* s_fv = sub("finite-volume", "two-sample KS of low-level weights across depths");
  req_a(s_fv);
  s_fv->add_option("--depths", op->depths, "two depths")->default_val(std::vector<int>{10, 20});
  s_fv->add_option("--steps", op->steps, "steps per replica")->default_val(1000000);
  s_fv->add_option("--replicas", op->replicas, "replicas per depth")->default_val(1000);
  s_fv->add_option("--level", op->level, "highest compared level")->default_val(2);
  s_fv->add_option("--baseline", op->baseline, "also resample the first depth")->default_val(true);

  CLI::App* s_q = sub("quenched", "exact quenched checks on positive environments");
  s_q->add_option("--environments", op->environments, "random environments")->default_val(100);
  s_q->add_option("--eps", op->eps, "TV target")->default_val(1e-8);
  s_q->add_option("--sample", op->sample, "use estimated environments from this directory");

  CLI::App* s_g = sub("gibbs-toy", "transfer-operator identities on finite toy models");
  s_g->add_option("--spec", op->spec, "toy spec JSON (replaces the built-in limit spec)");
  s_g->add_option("--max-n", op->max_n, "largest finite volume for brute force")->default_val(4);
  s_g->add_option("--depths", op->depths, "depths for the thermodynamic limit")
      ->default_val(std::vector<int>{4, 6, 8, 10, 12, 14, 16, 18, 20});

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return 2;
  }
  CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = chosen->get_name();
  Options& o = store[cmd];

  std::string out_dir = o.common.out;
  if (out_dir.empty()) {
    const char* env = std::getenv("ERRW_OUTPUT_DIR");
    out_dir = env && *env ? env : "errw_out";
  }

  std::vector<ExperimentReport> reports;
  std::map<std::string, std::string> extra_files;
  json extra_manifest;
  try {
    if (cmd == "simulate") {
      check_a(o.a);
      auto ladder = make_ladder(o.common, 30);
      ReplicaPlan plan;
      plan.a = parse_rational(o.a).get_d();
      plan.horizon = o.steps;
      plan.master_seed = o.common.seed;
      plan.keep_counts = true;
      const auto runs = run_replicas(*ladder, plan, o.replicas, o.common.threads);
      std::string lines;
      for (const auto& r : runs) lines += io::replica_record(r).dump() + "\n";
      extra_files["replicas.jsonl"] = lines;
      if (o.keep_path) {
        std::string paths;
        for (const auto& r : runs) {
          Rng rng(r.seed);
          ReinforcementState st(*ladder, plan.a, ladder->start());
          RunOptions ro;
          ro.keep_path = true;
          const auto res = errw::run(st, plan.horizon, rng, ro);
          paths += json{{"seed", r.seed}, {"vertices", res.path->vertices}}.dump() + "\n";
        }
        extra_files["paths.jsonl"] = paths;
      }
      ExperimentReport rep;
      rep.experiment = "simulate";
      rep.config = {{"ladder", io::ladder_descriptor(*ladder)}, {"a", o.a}, {"T", o.steps}, {"replicas", o.replicas}};
      reports.push_back(std::move(rep));
      if (const auto w = a_min_warning(ladder->tree(), plan.a)) err << "warning: " << *w << "\n";
    } else if (cmd == "exchangeability") {
      for (const auto& a : o.a_list) check_a(a);
      ExchangeabilityConfig cfg;
      cfg.ladder = make_ladder(o.common, 2);
      cfg.a_values = o.a_list;
      cfg.max_length = o.max_length;
      cfg.max_paths = o.cap;
      reports.push_back(exchangeability_experiment(cfg));
    } else if (cmd == "tails" || cmd == "range") {
      check_a(o.a);
      LocalizationConfig cfg;
      cfg.ladder = make_ladder(o.common, 30);
      cfg.a_text = o.a;
      cfg.times = o.times;
      cfg.replicas = o.replicas;
      cfg.master_seed = o.common.seed;
      cfg.threads = o.common.threads;
      cfg.min_count = o.min_count;
      if (cmd == "tails") cfg.r2_min = o.r2_min;
      cfg.range_ratio_max = o.ratio_max;
      if (const auto w = a_min_warning(cfg.ladder->tree(), parse_rational(o.a).get_d())) err << "warning: " << *w << "\n";
      reports.push_back(cmd == "tails" ? tail_experiment(cfg) : range_experiment(cfg));
    } else if (cmd == "equilibrium") {
      check_a(o.a);
      EquilibriumConfig cfg;
      cfg.ladder = make_ladder(o.common, 30);
      cfg.a_text = o.a;
      cfg.half_times = o.times;
      cfg.replicas = o.replicas;
      cfg.master_seed = o.common.seed;
      cfg.threads = o.common.threads;
      cfg.bootstrap_replicates = o.bootstrap;
      reports.push_back(equilibrium_experiment(cfg));
      AnnealedConfig an;
      an.ladder = cfg.ladder;
      an.a_text = o.a;
      an.half_time = cfg.half_times.empty() ? 1000 : *std::max_element(o.times.begin(), o.times.end());
      an.replicas = o.replicas;
      an.master_seed = o.common.seed + 1;
      an.threads = o.common.threads;
      reports.push_back(annealed_check(an));
    } else if (cmd == "environments") {
      check_a(o.a);
      auto ladder = make_ladder(o.common, 20);
      const auto s = sample_environments(ladder, o.a, o.steps, o.replicas, o.common.seed, o.common.threads);
      save_sample(s, (fs::path(out_dir) / "sample").string());
      ExperimentReport rep;
      rep.experiment = "environments";
      rep.config = {{"ladder", io::ladder_descriptor(*ladder)}, {"a", o.a}, {"T", o.steps}, {"replicas", o.replicas}};
      rep.statistics = {{"kept", s.size()}, {"discarded", s.discarded}, {"fully_covered", s.fully_covered().size()}};
      reports.push_back(std::move(rep));
    } else if (cmd == "decay") {
      const auto s = obtain_sample(o, make_ladder(o.common, 20), 1000000, 1000);
      DecayConfig cfg;
      cfg.min_count = o.min_count;
      cfg.bootstrap_replicates = o.bootstrap;
      cfg.bootstrap_seed = o.common.seed + 11;
      cfg.exceed_from = o.exceed_from;
      cfg.exceed_to = o.exceed_to;
      reports.push_back(decay_experiment(s, cfg));
    } else if (cmd == "logratio") {
      const auto s = obtain_sample(o, make_ladder(o.common, 10), 1000000, 1000);
      LogRatioConfig cfg;
      cfg.thresholds = o.thresholds;
      cfg.min_count = o.min_count;
      cfg.r2_min = o.r2_min;
      cfg.level = o.level;
      reports.push_back(logratio_experiment(s, cfg));
    } else if (cmd == "mixture") {
      const auto s = obtain_sample(o, make_ladder(o.common, 1), 1000000, 1000);
      MixtureConfig mc;
      mc.a_text = s.meta.a_text;
      mc.max_length = o.max_length;
      mc.bootstrap_replicates = o.bootstrap;
      mc.bootstrap_seed = o.common.seed + 7;
      reports.push_back(mixture_check(s, mc));
      ConditionalConfig cc;
      cc.a_text = s.meta.a_text;
      cc.rho_length = o.rho_length;
      reports.push_back(conditional_check(s, cc));
    } else if (cmd == "finite-volume") {
      check_a(o.a);
      if (o.depths.size() != 2) throw ConfigError("--depths takes exactly two depths");
      std::vector<EnvironmentSample> samples;
      for (std::size_t j = 0; j < o.depths.size(); ++j) {
        Common c = o.common;
        c.depth = std::to_string(o.depths[j]);
        samples.push_back(sample_environments(make_ladder(c, 10), o.a, o.steps, o.replicas, o.common.seed + j,
                                              o.common.threads));
      }
      std::optional<EnvironmentSample> base;
      if (o.baseline) {
        Common c = o.common;
        c.depth = std::to_string(o.depths[0]);
        base = sample_environments(make_ladder(c, 10), o.a, o.steps, o.replicas, o.common.seed + 2,
                                   o.common.threads);
      }
      extra_manifest["sample_seeds"] = {{"depth_a", o.common.seed}, {"depth_b", o.common.seed + 1},
                                        {"baseline", o.common.seed + 2}};
      FiniteVolumeConfig cfg;
      cfg.max_level = o.level;
      reports.push_back(finite_volume_convergence(samples[0], samples[1], base ? &*base : nullptr, cfg));
    } else if (cmd == "quenched") {
      QuenchedConfig cfg;
      std::optional<EnvironmentSample> s;
      if (!o.sample.empty()) {
        try {
          s = load_sample(o.sample);
        } catch (const std::exception& e) {
          throw ConfigError("--sample " + o.sample + ": " + e.what());
        }
        cfg.ladder = s->ladder;
        cfg.sample = &*s;
      } else {
        cfg.ladder = make_ladder(o.common, 3);
      }
      if (!cfg.ladder->bounded()) throw ConfigError("quenched checks need a finite ladder");
      cfg.environments = o.environments;
      cfg.master_seed = o.common.seed;
      cfg.eps = o.eps;
      reports.push_back(quenched_experiment(cfg));
    } else if (cmd == "gibbs-toy") {
      GibbsConfig cfg;
      cfg.max_n = o.max_n;
      cfg.limit_depths = o.depths;
      if (!o.spec.empty()) {
        try {
          cfg.limit_spec = gibbs::spec_from_file(o.spec);
        } catch (const std::exception& e) {
          throw ConfigError("--spec " + o.spec + ": " + e.what());
        }
        cfg.specs = gibbs::toy_specs();
        cfg.specs.push_back(cfg.limit_spec);
      }
      reports.push_back(gibbs_experiment(cfg));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n" << chosen->help();
    return 2;
  } catch (const std::exception& e) {
    err << cmd << " failed: " << e.what() << "\n";
    return 1;
  }

  // Artifacts.
  json all = json::array();
  std::vector<std::string> files;
  std::string summary;
  bool pass = true;
  try {
    for (const auto& r : reports) {
      all.push_back(r.to_json());
      for (const auto& [name, content] : r.files) {
        io::write_text(fs::path(out_dir) / name, content);
        files.push_back(name);
      }
      for (const auto& v : r.verdicts) {
        summary += std::string(v.pass ? "PASS" : "FAIL") + " " + v.criterion + " [" + r.experiment + "] " + v.check;
        if (!v.detail.empty()) summary += ": " + v.detail;
        summary += "\n";
      }
      pass = pass && r.passed();
    }
    for (const auto& [name, content] : extra_files) {
      io::write_text(fs::path(out_dir) / name, content);
      files.push_back(name);
    }
    io::write_json(fs::path(out_dir) / "report.json", json{{"command", cmd}, {"reports", all}, {"passed", pass}});
    io::write_text(fs::path(out_dir) / "summary.txt", summary);
    files.push_back("report.json");
    files.push_back("summary.txt");

    json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = cmd;
    manifest["argv"] = args_in;
    json config = option_echo(chosen);
    manifest["config"] = config;
    manifest["master_seed"] = o.common.seed;
    manifest["threads"] = o.common.threads;
    manifest["rng"] = io::rng_manifest();
    manifest["files"] = files;
    for (const auto& [k, v] : extra_manifest.items()) manifest[k] = v;
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_json(fs::path(out_dir) / "manifest.json", manifest);
  } catch (const std::exception& e) {
    err << "cannot write results: " << e.what() << "\n";
    return 1;
  }
  out << summary;
  out << (pass ? "all checks passed" : "some checks failed") << " (" << out_dir << ")\n";
  return pass ? 0 : 1;
}

}  // namespace errw::cli
