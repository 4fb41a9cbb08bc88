#include "errw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "errw/io.hpp"

namespace errw {

using nlohmann::json;
using io::format_double;

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void ExperimentReport::add(std::string criterion, std::string check, bool pass, std::string detail) {
  verdicts.push_back({std::move(criterion), std::move(check), pass, std::move(detail)});
}

json ExperimentReport::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["config"] = config;
  j["statistics"] = statistics;
  json v = json::array();
  for (const auto& x : verdicts) {
    v.push_back({{"criterion", x.criterion}, {"check", x.check}, {"pass", x.pass}, {"detail", x.detail}});
  }
  j["verdicts"] = std::move(v);
  j["passed"] = passed();
  return j;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::vector<std::uint64_t> sorted_unique(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string path_text(const LadderGraph& ladder, const PathRecord& p) {
  std::string s;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    const auto lv = ladder.vertex(p.vertices[i]);
    if (i) s += ' ';
    s += "(" + std::to_string(lv.level) + ":" + std::to_string(ladder.tree().label(lv.site)) + ")";
  }
  return s;
}

json fit_json(const stats::FitResult& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"bins_used", f.bins_used}};
}

double bonferroni_k(double k_min, double alpha, std::size_t tests) {
  const double z = stats::normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(tests)));
  return std::max(k_min, z);
}

json localization_config_json(const LocalizationConfig& cfg) {
  return {{"ladder", io::ladder_descriptor(*cfg.ladder)},
          {"a", cfg.a_text},
          {"times", cfg.times},
          {"replicas", cfg.replicas},
          {"master_seed", cfg.master_seed},
          {"min_count", cfg.min_count},
          {"r2_min", cfg.r2_min},
          {"range_ratio_max", cfg.range_ratio_max}};
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ReplicaSummary> localization_runs(const LocalizationConfig& cfg) {
  if (cfg.times.empty()) throw std::invalid_argument("localization: no times");
  ReplicaPlan plan;
  plan.a = parse_rational(cfg.a_text).get_d();
  plan.checkpoints = sorted_unique(cfg.times);
  plan.horizon = plan.checkpoints.back();
  plan.master_seed = cfg.master_seed;
  return run_replicas(*cfg.ladder, plan, cfg.replicas, cfg.threads);
}

namespace {

TailCurve survival_from_levels(const std::vector<int>& levels) {
  TailCurve c;
  const int top = *std::max_element(levels.begin(), levels.end());
  std::vector<std::uint64_t> at(static_cast<std::size_t>(top) + 2, 0);
  for (int l : levels) ++at[static_cast<std::size_t>(l)];
  c.trials = levels.size();
  std::uint64_t above = c.trials;
  for (int n = 0; n <= top + 1; ++n) {
    c.thresholds.push_back(n);
    c.hits.push_back(above);
    c.survival.push_back(static_cast<double>(above) / static_cast<double>(c.trials));
    c.ci.push_back(stats::binomial_ci(above, c.trials));
    above -= at[static_cast<std::size_t>(n)];
  }
  return c;
}

std::vector<int> checkpoint_levels(const LadderGraph& ladder, const std::vector<ReplicaSummary>& runs,
                                   std::size_t checkpoint) {
  std::vector<int> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(ladder.vertex_level(r.checkpoints.at(checkpoint).vertex));
  return out;
}

std::size_t checkpoint_index(const std::vector<ReplicaSummary>& runs, std::uint64_t t) {
  const auto& cps = runs.at(0).checkpoints;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].time == t) return i;
  }
  throw std::invalid_argument("no checkpoint at t = " + std::to_string(t));
}

}  // namespace

TailCurve level_survival(const LadderGraph& ladder, const std::vector<ReplicaSummary>& runs,
                         std::size_t checkpoint) {
  if (runs.empty()) throw std::invalid_argument("level_survival: no replicas");
  return survival_from_levels(checkpoint_levels(ladder, runs, checkpoint));
}

ExperimentReport tail_experiment(const LocalizationConfig& cfg, const std::vector<ReplicaSummary>& runs) {
  ExperimentReport rep;
  rep.experiment = "tails";
  rep.config = localization_config_json(cfg);
  const auto times = sorted_unique(cfg.times);
  io::CsvTable table({"t", "n", "hits", "trials", "survival", "ci_lo", "ci_hi"});
  std::vector<TailCurve> curves;
  json per_t = json::array();
  for (auto t : times) {
    const auto levels = checkpoint_levels(*cfg.ladder, runs, checkpoint_index(runs, t));
    TailCurve c = survival_from_levels(levels);
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
      table.row({std::to_string(t), std::to_string(static_cast<int>(c.thresholds[i])),
                 std::to_string(c.hits[i]), std::to_string(c.trials), format_double(c.survival[i]),
                 format_double(c.ci[i].lo), format_double(c.ci[i].hi)});
    }
    json entry{{"t", t}};
    try {
      const auto fit = stats::loglinear_fit(c.thresholds, c.survival, c.hits, cfg.min_count);
      entry["fit"] = fit_json(fit);
      const bool ok = fit.slope < 0.0 && fit.r2 >= cfg.r2_min;
      rep.add("C6", "log-linear tail at t=" + std::to_string(t), ok,
              "slope " + fmt(fit.slope) + ", R2 " + fmt(fit.r2) + " over " +
                  std::to_string(fit.bins_used.size()) + " bins");
    } catch (const std::invalid_argument& e) {
      rep.add("C6", "log-linear tail at t=" + std::to_string(t), false,
              std::string("insufficient occupancy: ") + e.what());
    }
    per_t.push_back(std::move(entry));
    curves.push_back(std::move(c));
  }
  rep.statistics["per_t"] = std::move(per_t);

  // Uniformity in t, as far as it can be seen: overlapping Wilson intervals
  // at every bin that is well occupied in both curves.
  for (std::size_t a = 0; a + 1 < curves.size(); ++a) {
    const auto& c1 = curves[a];
    const auto& c2 = curves[a + 1];
    std::size_t compared = 0, disjoint = 0;
    const std::size_t bins = std::min(c1.hits.size(), c2.hits.size());
    for (std::size_t n = 0; n < bins; ++n) {
      if (c1.hits[n] < cfg.min_count || c2.hits[n] < cfg.min_count) continue;
      ++compared;
      if (!c1.ci[n].overlaps(c2.ci[n])) ++disjoint;
    }
    rep.add("C6", "curves t=" + std::to_string(times[a]) + " and t=" + std::to_string(times[a + 1]) +
                      " agree within CIs",
            disjoint == 0 && compared > 0,
            std::to_string(disjoint) + " of " + std::to_string(compared) + " bins disjoint");
  }
  if (cfg.ladder->bounded()) {
    int reached = 0;
    for (const auto& r : runs) reached = std::max(reached, r.max_level);
    rep.statistics["max_level_reached"] = reached;
    rep.add("aux", "walkers stay below the truncation depth", reached < *cfg.ladder->depth(),
            "max level " + std::to_string(reached) + " of depth " + std::to_string(*cfg.ladder->depth()));
  }
  rep.files["tails.csv"] = table.str();
  return rep;
}

ExperimentReport tail_experiment(const LocalizationConfig& cfg) {
  return tail_experiment(cfg, localization_runs(cfg));
}

ExperimentReport range_experiment(const LocalizationConfig& cfg, const std::vector<ReplicaSummary>& runs) {
  ExperimentReport rep;
  rep.experiment = "range";
  rep.config = localization_config_json(cfg);
  const auto times = sorted_unique(cfg.times);
  if (times.size() < 2) throw std::invalid_argument("range: need at least two times");
  io::CsvTable table({"t", "q10", "q25", "median", "q75", "q90", "max"});
  std::vector<double> medians, logt;
  for (auto t : times) {
    const std::size_t k = checkpoint_index(runs, t);
    std::vector<double> m;
    m.reserve(runs.size());
    for (const auto& r : runs) m.push_back(r.checkpoints[k].max_level);
    const double med = stats::median(m);
    medians.push_back(med);
    logt.push_back(std::log(static_cast<double>(t)));
    table.row({std::to_string(t), format_double(stats::quantile(m, 0.1)),
               format_double(stats::quantile(m, 0.25)), format_double(med),
               format_double(stats::quantile(m, 0.75)), format_double(stats::quantile(m, 0.9)),
               format_double(*std::max_element(m.begin(), m.end()))});
  }
  rep.statistics["medians"] = medians;
  const bool monotone = std::is_sorted(medians.begin(), medians.end());
  rep.add("C7", "medians nondecreasing in t", monotone);
  const double ratio = medians.front() > 0.0 ? medians.back() / medians.front()
                                             : std::numeric_limits<double>::infinity();
  rep.statistics["median_ratio"] = std::isfinite(ratio) ? json(ratio) : json("inf");
  rep.add("C7", "median ratio t=" + std::to_string(times.back()) + " / t=" + std::to_string(times.front()) +
                    " <= " + fmt(cfg.range_ratio_max),
          ratio <= cfg.range_ratio_max, "ratio " + fmt(ratio));
  const auto fit = stats::linear_fit(logt, medians);
  rep.statistics["median_vs_log_t"] = fit_json(fit);
  rep.add("C7", "median vs ln t slope > 0", fit.slope > 0.0,
          "slope " + fmt(fit.slope) + ", R2 " + fmt(fit.r2));
  rep.files["range.csv"] = table.str();
  return rep;
}

ExperimentReport range_experiment(const LocalizationConfig& cfg) {
  return range_experiment(cfg, localization_runs(cfg));
}

// ---------------------------------------------------------------------------

ExperimentReport equilibrium_experiment(const EquilibriumConfig& cfg) {
  const auto& ladder = *cfg.ladder;
  if (!ladder.bounded()) throw std::invalid_argument("equilibrium: needs a finite ladder");
  auto half = sorted_unique(cfg.half_times);
  if (half.size() < 2) throw std::invalid_argument("equilibrium: need at least two times");
  ExperimentReport rep;
  rep.experiment = "equilibrium";
  rep.config = {{"ladder", io::ladder_descriptor(ladder)},
                {"a", cfg.a_text},
                {"half_times", half},
                {"replicas", cfg.replicas},
                {"master_seed", cfg.master_seed},
                {"bootstrap_replicates", cfg.bootstrap_replicates},
                {"floor_factor", cfg.floor_factor}};
  ReplicaPlan plan;
  plan.a = parse_rational(cfg.a_text).get_d();
  plan.master_seed = cfg.master_seed;
  for (auto t : half) {
    plan.checkpoints.push_back(2 * t);
    plan.checkpoints.push_back(2 * t + 1);
  }
  plan.horizon = plan.checkpoints.back();
  const auto runs = run_replicas(ladder, plan, cfg.replicas, cfg.threads);
  const std::size_t nv = ladder.vertex_count();
  const double R = static_cast<double>(runs.size());

  auto law_at = [&](std::size_t k) {
    std::vector<double> mu(nv, 0.0);
    for (const auto& r : runs) mu[r.checkpoints[k].vertex] += 1.0 / R;
    return mu;
  };
  std::vector<std::vector<double>> even, odd;
  bool support_ok = true;
  for (std::size_t j = 0; j < half.size(); ++j) {
    even.push_back(law_at(2 * j));
    odd.push_back(law_at(2 * j + 1));
    for (std::size_t v = 0; v < nv; ++v) {
      const bool is_even = ladder.parity(static_cast<VertexId>(v)) == Parity::Even;
      if ((is_even && odd.back()[v] != 0.0) || (!is_even && even.back()[v] != 0.0)) support_ok = false;
    }
  }
  rep.add("aux", "even-time laws vanish on the odd class and vice versa", support_ok);

  std::vector<double> tv;
  io::CsvTable tv_table({"t", "tv"});
  for (std::size_t j = 0; j + 1 < half.size(); ++j) {
    tv.push_back(stats::tv_distance(even[j], even[j + 1]));
    tv_table.row({std::to_string(2 * half[j + 1]), format_double(tv.back())});
  }
  rep.statistics["tv_successive_even"] = tv;

  // Noise floor: TV between two independent resamples of size R from the
  // last even-time empirical law.
  std::vector<VertexId> last;
  for (const auto& r : runs) last.push_back(r.checkpoints[2 * (half.size() - 1)].vertex);
  Rng boot(derive_replica_seed(cfg.master_seed, ~std::uint64_t{0}));
  double floor = 0.0;
  std::vector<double> h1(nv), h2(nv);
  for (std::size_t b = 0; b < cfg.bootstrap_replicates; ++b) {
    std::fill(h1.begin(), h1.end(), 0.0);
    std::fill(h2.begin(), h2.end(), 0.0);
    for (std::size_t i = 0; i < last.size(); ++i) {
      h1[last[boot.below(last.size())]] += 1.0 / R;
      h2[last[boot.below(last.size())]] += 1.0 / R;
    }
    floor += stats::tv_distance(h1, h2);
  }
  floor /= static_cast<double>(cfg.bootstrap_replicates);
  rep.statistics["noise_floor"] = floor;
  rep.add("aux", "last successive TV within " + fmt(cfg.floor_factor) + "x noise floor",
          tv.back() <= cfg.floor_factor * floor, "tv " + fmt(tv.back()) + ", floor " + fmt(floor));

  // Exponential envelope of the even-time law in the level.
  std::vector<double> level_mass(static_cast<std::size_t>(*ladder.depth()) + 1, 0.0);
  std::vector<std::uint64_t> level_hits(level_mass.size(), 0);
  for (VertexId v : last) {
    level_mass[ladder.vertex_level(v)] += 1.0 / R;
    ++level_hits[ladder.vertex_level(v)];
  }
  std::vector<double> lv(level_mass.size());
  std::iota(lv.begin(), lv.end(), 0.0);
  try {
    const auto fit = stats::loglinear_fit(lv, level_mass, level_hits, 30);
    rep.statistics["envelope_fit"] = fit_json(fit);
    rep.add("aux", "even-time law decays exponentially in the level", fit.slope < 0.0,
            "slope " + fmt(fit.slope) + ", R2 " + fmt(fit.r2));
  } catch (const std::invalid_argument& e) {
    rep.add("aux", "even-time law decays exponentially in the level", false, e.what());
  }

  io::CsvTable law({"vertex", "level", "site", "parity", "mu_even", "mu_odd"});
  for (std::size_t v = 0; v < nv; ++v) {
    const auto x = ladder.vertex(static_cast<VertexId>(v));
    law.row({std::to_string(v), std::to_string(x.level), std::to_string(ladder.tree().label(x.site)),
             ladder.parity(static_cast<VertexId>(v)) == Parity::Even ? "even" : "odd",
             format_double(even.back()[v]), format_double(odd.back()[v])});
  }
  rep.files["equilibrium_tv.csv"] = tv_table.str();
  rep.files["equilibrium_law.csv"] = law.str();
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

json sample_json(const EnvironmentSample& s) {
  return {{"ladder", io::ladder_descriptor(*s.ladder)},
          {"a", s.meta.a_text},
          {"T", s.meta.horizon},
          {"replicas", s.meta.replicas},
          {"master_seed", s.meta.master_seed},
          {"kept", s.size()},
          {"discarded", s.discarded.size()}};
}

double bootstrap_se(const std::vector<double>& q, std::size_t B, std::uint64_t seed) {
  const auto reps = stats::bootstrap(q.size(), B, seed, [&](std::span<const std::size_t> idx) {
    double s = 0.0;
    for (auto i : idx) s += q[i];
    return s / static_cast<double>(idx.size());
  });
  return stats::stddev(reps);
}

}  // namespace

ExperimentReport mixture_check(const EnvironmentSample& sample, const MixtureConfig& cfg) {
  const auto& ladder = *sample.ladder;
  ExperimentReport rep;
  rep.experiment = "mixture";
  rep.config = {{"sample", sample_json(sample)},
                {"a", cfg.a_text},
                {"max_length", cfg.max_length},
                {"k_min", cfg.k_min},
                {"alpha", cfg.alpha},
                {"bootstrap_replicates", cfg.bootstrap_replicates},
                {"bootstrap_seed", cfg.bootstrap_seed}};
  const Rational a = parse_rational(cfg.a_text);
  const auto covered = sample.fully_covered();
  rep.statistics["environments_used"] = covered.size();
  rep.statistics["filtered_out"] = sample.size() - covered.size();
  if (covered.size() < 2) {
    rep.add("C4", "strictly positive environments available", false,
            std::to_string(covered.size()) + " after the coverage filter");
    return rep;
  }
  const double T = static_cast<double>(sample.meta.horizon);
  const double bias = 3.0 / T;

  std::vector<PathRecord> paths;
  for (int len = 1; len <= cfg.max_length; ++len) {
    auto p = enumerate_paths(ladder, ladder.start(), len, 1'000'000);
    paths.insert(paths.end(), p.begin(), p.end());
  }
  const double k = bonferroni_k(cfg.k_min, cfg.alpha, paths.size());
  rep.statistics["paths"] = paths.size();
  rep.statistics["k"] = k;
  rep.statistics["bias_budget"] = bias;

  // The empty path has probability 1 on both sides.
  {
    const PathRecord empty{{ladder.start()}};
    const bool ok = path_probability_exact(ladder, a, empty) == 1 &&
                    path_probability(sample.environments[covered[0]], empty) == 1.0;
    rep.add("C4", "length-0 path has probability 1", ok);
  }

  io::CsvTable table({"path", "length", "exact", "exact_value", "env_mean", "bootstrap_se", "band",
                      "abs_diff", "pass"});
  std::size_t failures = 0;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Rational exact = path_probability_exact(ladder, a, paths[p]);
    std::vector<double> q;
    q.reserve(covered.size());
    for (auto i : covered) q.push_back(path_probability(sample.environments[i], paths[p]));
    const double m = stats::mean(q);
    const double se = bootstrap_se(q, cfg.bootstrap_replicates, cfg.bootstrap_seed + p);
    const double band = k * se + bias;
    const double diff = std::fabs(m - exact.get_d());
    const bool ok = diff <= band;
    failures += !ok;
    table.row({path_text(ladder, paths[p]), std::to_string(paths[p].length()), to_string(exact),
               format_double(exact.get_d()), format_double(m), format_double(se), format_double(band),
               format_double(diff), ok ? "1" : "0"});
  }
  rep.add("C4",
          "all " + std::to_string(paths.size()) + " paths of length 1.." + std::to_string(cfg.max_length) +
              " within k*SE + 3/T",
          failures == 0, std::to_string(failures) + " outside the band, k = " + fmt(k));

  // Parity equilibrium as an environment average: the law of X_T against
  // the mean of x_even (T even) or x_odd (T odd), paired per replica.
  const Parity par = sample.meta.horizon % 2 == 0 ? Parity::Even : Parity::Odd;
  std::vector<VertexId> cls;
  for (VertexId v = 0; v < ladder.vertex_count(); ++v) {
    if (ladder.parity(v) == par) cls.push_back(v);
  }
  const double kv = bonferroni_k(cfg.k_min, cfg.alpha, cls.size());
  io::CsvTable eq({"vertex", "mu_hat", "x_mean", "se", "band", "pass"});
  std::size_t eq_fail = 0;
  for (VertexId v : cls) {
    std::vector<double> d, ind;
    for (auto i : covered) {
      const double xv = vertex_weight(sample.environments[i], v);
      const double hit = sample.final_vertex[i] == v ? 1.0 : 0.0;
      d.push_back(hit - xv);
      ind.push_back(hit);
    }
    const double md = stats::mean(d);
    const double se = stats::standard_error(d);
    const double band = kv * se + bias;
    const bool ok = std::fabs(md) <= band;
    eq_fail += !ok;
    eq.row({std::to_string(v), format_double(stats::mean(ind)), format_double(stats::mean(ind) - md),
            format_double(se), format_double(band), ok ? "1" : "0"});
  }
  rep.add("C4", std::string("law of X_T matches the mean ") + (par == Parity::Even ? "x_even" : "x_odd"),
          eq_fail == 0, std::to_string(eq_fail) + " of " + std::to_string(cls.size()) + " vertices outside");
  rep.files["mixture_paths.csv"] = table.str();
  rep.files["mixture_equilibrium.csv"] = eq.str();
  return rep;
}

ExperimentReport conditional_check(const EnvironmentSample& sample, const ConditionalConfig& cfg) {
  const auto& ladder = *sample.ladder;
  ExperimentReport rep;
  rep.experiment = "conditional";
  rep.config = {{"sample", sample_json(sample)}, {"a", cfg.a_text}, {"rho_length", cfg.rho_length}, {"k", cfg.k}};
  const Rational a = parse_rational(cfg.a_text);
  const auto ref = ladder.edge(ladder.reference_edge());
  const VertexId b = ref.u == ladder.start() ? ref.v : ref.u;
  const PathRecord pi{{ladder.start(), b}};
  const Reweighting rw = conditional_reweight(sample, pi, a);
  rep.statistics["pi"] = path_text(ladder, pi);
  rep.statistics["exact_pi"] = to_string(rw.exact);
  rep.statistics["raw_mean"] = rw.raw_mean;
  rep.statistics["raw_se"] = rw.raw_se;
  rep.statistics["zero_weight"] = rw.zero_weight;
  rep.add("C5", "mean unnormalized weight within " + fmt(cfg.k) + " SE of 1",
          std::fabs(rw.raw_mean - 1.0) <= cfg.k * rw.raw_se,
          "mean " + fmt(rw.raw_mean) + ", SE " + fmt(rw.raw_se));

  const EdgeCounts after = crossing_counts(ladder, pi);
  io::CsvTable table({"rho", "exact", "exact_value", "prediction", "se", "abs_diff", "pass"});
  std::size_t failures = 0, total = 0;
  for (int len = 1; len <= cfg.rho_length; ++len) {
    for (const auto& rho : enumerate_paths(ladder, b, len, 1'000'000)) {
      const Rational exact = path_probability_exact(ladder, a, rho, &after);
      const auto est = weighted_path_probability(rw.weighted, rho);
      const double diff = std::fabs(est.mean - exact.get_d());
      const bool ok = diff <= cfg.k * est.se;
      failures += !ok;
      ++total;
      table.row({path_text(ladder, rho), to_string(exact), format_double(exact.get_d()),
                 format_double(est.mean), format_double(est.se), format_double(diff), ok ? "1" : "0"});
    }
  }
  rep.add("C5", "P(rho | pi) for all " + std::to_string(total) + " continuations within " + fmt(cfg.k) + " SE",
          failures == 0, std::to_string(failures) + " outside");
  rep.files["conditional.csv"] = table.str();
  return rep;
}

ExperimentReport decay_experiment(const EnvironmentSample& sample, const DecayConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "decay";
  rep.config = {{"sample", sample_json(sample)},
                {"min_count", cfg.min_count},
                {"bootstrap_replicates", cfg.bootstrap_replicates},
                {"bootstrap_seed", cfg.bootstrap_seed},
                {"exceed_levels", {cfg.exceed_from, cfg.exceed_to}}};
  const DecayProfile p = decay_profile(sample, cfg.min_count, cfg.bootstrap_replicates, cfg.bootstrap_seed);
  rep.statistics["c4"] = p.c4;
  rep.statistics["c4_ci"] = {p.c4_ci.lo, p.c4_ci.hi};
  rep.statistics["fit"] = fit_json(p.fit);
  rep.statistics["fit_levels"] = p.fit_levels;
  rep.statistics["bootstrap_failures"] = p.bootstrap_failures;
  rep.add("C8", "fitted decay rate positive with 95% bootstrap CI excluding 0",
          p.c4 > 0.0 && p.c4_ci.lo > 0.0,
          "c4 " + fmt(p.c4) + ", CI [" + fmt(p.c4_ci.lo) + ", " + fmt(p.c4_ci.hi) + "]");

  io::CsvTable table({"level", "values", "positive", "q10", "q25", "median", "q75", "q90", "exceed",
                      "exceed_freq", "exceed_ci_lo", "exceed_ci_hi"});
  for (const auto& l : p.levels) {
    table.row({std::to_string(l.level), std::to_string(l.values), std::to_string(l.positive),
               format_double(l.q10), format_double(l.q25), format_double(l.median), format_double(l.q75),
               format_double(l.q90), std::to_string(l.exceed), format_double(l.exceed_freq),
               format_double(l.exceed_ci.lo), format_double(l.exceed_ci.hi)});
  }
  rep.files["decay_profile.csv"] = table.str();

  const int lo = cfg.exceed_from, hi = cfg.exceed_to;
  if (hi >= static_cast<int>(p.levels.size()) || lo >= hi) {
    rep.add("C8", "exceedance decreases over levels " + std::to_string(lo) + ".." + std::to_string(hi), false,
            "ladder too shallow");
    return rep;
  }
  // Decreasing, up to sampling noise: no level-to-level increase beyond
  // overlapping Wilson intervals, and a clear drop from the first level to
  // the last.
  std::size_t upticks = 0;
  for (int l = lo; l < hi; ++l) {
    const auto& x = p.levels[l];
    const auto& y = p.levels[l + 1];
    if (y.exceed_freq > x.exceed_freq && !x.exceed_ci.overlaps(y.exceed_ci)) ++upticks;
  }
  const bool drop = p.levels[hi].exceed_ci.hi < p.levels[lo].exceed_ci.lo;
  std::vector<double> fr, lv;
  for (int l = lo; l <= hi; ++l) {
    fr.push_back(p.levels[l].exceed_freq);
    lv.push_back(l);
  }
  const auto trend = stats::linear_fit(lv, fr);
  rep.statistics["exceed_trend_slope"] = trend.slope;
  rep.add("C8", "exceedance decreases over levels " + std::to_string(lo) + ".." + std::to_string(hi),
          upticks == 0 && drop && trend.slope < 0.0,
          "freq " + fmt(p.levels[lo].exceed_freq) + " -> " + fmt(p.levels[hi].exceed_freq) + ", " +
              std::to_string(upticks) + " significant upticks, trend slope " + fmt(trend.slope));
  return rep;
}

ExperimentReport logratio_experiment(const EnvironmentSample& sample, const LogRatioConfig& cfg) {
  const auto& ladder = *sample.ladder;
  std::vector<double> thresholds = cfg.thresholds;
  if (thresholds.empty()) {
    for (int i = 0; i <= 24; ++i) thresholds.push_back(0.25 * i);
  }
  ExperimentReport rep;
  rep.experiment = "logratio";
  rep.config = {{"sample", sample_json(sample)},
                {"thresholds", thresholds},
                {"min_count", cfg.min_count},
                {"r2_min", cfg.r2_min},
                {"level", cfg.level}};
  const EdgeId e = ladder.rung_id(cfg.level, ladder.rung_choice());
  const EdgeId f = ladder.rung_id(cfg.level + 1, ladder.rung_choice());
  const auto tail = log_ratio_tail(sample, e, f, thresholds, cfg.min_count);
  rep.statistics["edges"] = {e, f};
  rep.statistics["contributing"] = tail.contributing;
  rep.statistics["excluded"] = tail.excluded;
  io::CsvTable table({"M", "hits", "trials", "survival", "ci_lo", "ci_hi"});
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    table.row({format_double(thresholds[i]), std::to_string(tail.curve.hits[i]),
               std::to_string(tail.curve.trials), format_double(tail.curve.survival[i]),
               format_double(tail.curve.ci[i].lo), format_double(tail.curve.ci[i].hi)});
  }
  rep.files["logratio_tail.csv"] = table.str();
  if (!tail.fitted) {
    rep.add("C9", "log survival linear in M", false, "fewer than two bins with enough hits");
    return rep;
  }
  rep.statistics["fit"] = fit_json(tail.fit);
  rep.add("C9", "log survival linear in M with negative slope, R2 >= " + fmt(cfg.r2_min),
          tail.fit.slope < 0.0 && tail.fit.r2 >= cfg.r2_min,
          "slope " + fmt(tail.fit.slope) + ", R2 " + fmt(tail.fit.r2) + " over " +
              std::to_string(tail.fit.bins_used.size()) + " bins");
  return rep;
}

ExperimentReport finite_volume_convergence(const EnvironmentSample& a, const EnvironmentSample& b,
                                           const EnvironmentSample* baseline,
                                           const FiniteVolumeConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "finite-volume";
  rep.config = {{"sample_a", sample_json(a)},
                {"sample_b", sample_json(b)},
                {"max_level", cfg.max_level},
                {"alpha", cfg.alpha}};
  if (baseline) rep.config["baseline"] = sample_json(*baseline);
  const auto& la = *a.ladder;
  const auto& lb = *b.ladder;
  if (!(la.tree() == lb.tree()) || la.reference_edge() != lb.reference_edge() ||
      la.start() != lb.start()) {
    throw std::invalid_argument("finite-volume: samples live on different ladders");
  }
  auto reference_values = [](const EnvironmentSample& s, EdgeId e) {
    std::vector<double> v;
    for (const auto& x : s.environments) v.push_back(x.weight(e) / x.weight(x.ladder().reference_edge()));
    return v;
  };
  std::vector<EdgeId> edges;
  for (EdgeId e = 0; e < la.edge_count(); ++e) {
    if (la.edge_level(e) <= cfg.max_level && lb.contains_edge(e) && la.edge_level(e) < *la.depth() &&
        e != la.reference_edge()) {
      edges.push_back(e);
    }
  }
  {
    const auto ra = reference_values(a, la.reference_edge());
    const auto rb = reference_values(b, lb.reference_edge());
    const bool ones = std::all_of(ra.begin(), ra.end(), [](double v) { return v == 1.0; }) &&
                      std::all_of(rb.begin(), rb.end(), [](double v) { return v == 1.0; });
    rep.add("C10", "reference weight is 1 at both depths", ones);
  }
  const double crit = stats::ks_critical(a.size(), b.size(), cfg.alpha);
  const double crit_bonf = stats::ks_critical(a.size(), b.size(), cfg.alpha / static_cast<double>(edges.size()));
  rep.statistics["critical"] = crit;
  rep.statistics["critical_bonferroni"] = crit_bonf;
  io::CsvTable table({"edge", "kind", "level", "index", "ks", "critical", "critical_bonferroni", "baseline_ks"});
  std::size_t over_bonf = 0, over_raw = 0;
  double worst = 0.0;
  for (EdgeId e : edges) {
    const double d = stats::ks_statistic(reference_values(a, e), reference_values(b, e));
    std::string base = "";
    if (baseline) base = format_double(stats::ks_statistic(reference_values(a, e), reference_values(*baseline, e)));
    worst = std::max(worst, d);
    over_bonf += d >= crit_bonf;
    over_raw += d >= crit;
    const auto ed = la.edge(e);
    table.row({std::to_string(e), ed.kind == EdgeKind::Rung ? "rung" : "horizontal", std::to_string(ed.level),
               std::to_string(ed.index), format_double(d), format_double(crit), format_double(crit_bonf), base});
  }
  rep.statistics["edges"] = edges.size();
  rep.statistics["worst_ks"] = worst;
  rep.statistics["edges_over_uncorrected"] = over_raw;
  rep.add("C10",
          "KS below the 5% two-sample critical value on all " + std::to_string(edges.size()) +
              " edges (family-wise, Bonferroni)",
          over_bonf == 0,
          "worst " + fmt(worst) + ", critical " + fmt(crit_bonf) + " (uncorrected " + fmt(crit) + ", " +
              std::to_string(over_raw) + " edges above it)");
  rep.files["finite_volume_ks.csv"] = table.str();
  return rep;
}

ExperimentReport annealed_check(const AnnealedConfig& cfg) {
  const auto& ladder = *cfg.ladder;
  ExperimentReport rep;
  rep.experiment = "annealed";
  rep.config = {{"ladder", io::ladder_descriptor(ladder)},
                {"a", cfg.a_text},
                {"half_time", cfg.half_time},
                {"replicas", cfg.replicas},
                {"master_seed", cfg.master_seed},
                {"k", cfg.k}};
  ReplicaPlan plan;
  plan.a = parse_rational(cfg.a_text).get_d();
  plan.master_seed = cfg.master_seed;
  const std::uint64_t s2 = 2 * cfg.half_time;
  plan.checkpoints = {s2, s2 + 1, s2 + 2};
  plan.horizon = s2 + 2;
  plan.keep_counts = true;
  const auto runs = run_replicas(ladder, plan, cfg.replicas, cfg.threads);
  auto lp = cfg.ladder;
  std::vector<Environment> envs;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Environment x = occupation_fractions(lp, runs[i].counts);
    if (x.strictly_positive()) {
      envs.push_back(std::move(x));
      used.push_back(i);
    }
  }
  rep.statistics["environments_used"] = used.size();
  if (used.size() < 2) {
    rep.add("aux", "strictly positive environments available", false);
    return rep;
  }
  std::vector<PathRecord> cylinders;
  for (VertexId v = 0; v < ladder.vertex_count(); ++v) {
    if (ladder.parity(v) != Parity::Even) continue;
    auto p = enumerate_paths(ladder, v, 2, 1'000'000);
    cylinders.insert(cylinders.end(), p.begin(), p.end());
  }
  const double k = bonferroni_k(cfg.k, 0.05, cylinders.size());
  const double bias = 3.0 / static_cast<double>(plan.horizon);
  io::CsvTable table({"cylinder", "empirical", "quenched_mean", "se", "band", "pass"});
  std::size_t failures = 0;
  for (const auto& c : cylinders) {
    std::vector<double> d, hit;
    for (std::size_t j = 0; j < used.size(); ++j) {
      const auto& cp = runs[used[j]].checkpoints;
      const double h = cp[0].vertex == c.vertices[0] && cp[1].vertex == c.vertices[1] &&
                               cp[2].vertex == c.vertices[2]
                           ? 1.0
                           : 0.0;
      const double q = vertex_weight(envs[j], c.front()) * path_probability(envs[j], c);
      d.push_back(h - q);
      hit.push_back(h);
    }
    const double md = stats::mean(d);
    const double se = stats::standard_error(d);
    const double band = k * se + bias;
    const bool ok = std::fabs(md) <= band;
    failures += !ok;
    table.row({path_text(ladder, c), format_double(stats::mean(hit)), format_double(stats::mean(hit) - md),
               format_double(se), format_double(band), ok ? "1" : "0"});
  }
  rep.add("aux", "cylinder frequencies at time 2s match the mean of Q_{x_even,x}", failures == 0,
          std::to_string(failures) + " of " + std::to_string(cylinders.size()) + " outside, k = " + fmt(k));
  rep.files["annealed.csv"] = table.str();
  return rep;
}

}  // namespace errw

namespace errw {

ExperimentReport exchangeability_experiment(const ExchangeabilityConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "exchangeability";
  rep.config = {{"ladder", io::ladder_descriptor(*cfg.ladder)},
                {"a", cfg.a_values},
                {"max_length", cfg.max_length},
                {"max_paths", cfg.max_paths}};
  io::CsvTable table({"a", "length", "paths", "groups", "largest_group", "violations"});
  for (const auto& a_text : cfg.a_values) {
    const Rational a = parse_rational(a_text);
    std::size_t violations = 0, paths = 0;
    for (int len = 1; len <= cfg.max_length; ++len) {
      const auto r = exchangeability_check(*cfg.ladder, a, len, cfg.max_paths);
      violations += r.violations.size();
      paths += r.paths;
      table.row({a_text, std::to_string(len), std::to_string(r.paths), std::to_string(r.groups),
                 std::to_string(r.largest_group), std::to_string(r.violations.size())});
    }
    rep.add("C1", "a = " + a_text + ": equal exact probabilities within every group, lengths 1.." +
                      std::to_string(cfg.max_length),
            violations == 0, std::to_string(paths) + " paths, " + std::to_string(violations) + " violations");
  }
  rep.files["exchangeability.csv"] = table.str();
  return rep;
}

ExperimentReport quenched_experiment(const QuenchedConfig& cfg) {
  const auto& ladder = *cfg.ladder;
  ExperimentReport rep;
  rep.experiment = "quenched";
  rep.config = {{"ladder", io::ladder_descriptor(ladder)},
                {"environments", cfg.environments},
                {"master_seed", cfg.master_seed},
                {"reversibility_steps", cfg.reversibility_steps},
                {"bound_steps", cfg.bound_steps},
                {"tolerance", cfg.tolerance},
                {"eps", cfg.eps},
                {"convergence_environments", cfg.convergence_environments},
                {"source", cfg.sample ? "sample" : "dirichlet"}};
  std::vector<Environment> envs;
  if (cfg.sample) {
    for (auto i : cfg.sample->fully_covered()) {
      if (envs.size() == cfg.environments) break;
      envs.push_back(cfg.sample->environments[i]);
    }
  } else {
    Rng rng(derive_replica_seed(cfg.master_seed, 0));
    for (std::size_t i = 0; i < cfg.environments; ++i) envs.push_back(random_environment(cfg.ladder, rng));
  }
  const std::size_t nv = ladder.vertex_count();
  const VertexId o = ladder.start();
  io::CsvTable table({"environment", "detailed_balance", "reversibility", "bound_excess", "t_star_even",
                      "t_star_odd", "parity_support"});
  double worst_db = 0.0, worst_rev = 0.0, worst_bound = 0.0;
  std::size_t conv_fail = 0, support_fail = 0;
  std::string tv_csv;
  for (std::size_t k = 0; k < envs.size(); ++k) {
    const auto& x = envs[k];
    const auto xv = vertex_weights(x);
    double db = 0.0;
    for (VertexId u = 0; u < nv; ++u) {
      for (const auto& inc : ladder.neighbors(u)) {
        db = std::max(db, std::fabs(xv[u] * transition_prob(x, u, inc.neighbor) -
                                    xv[inc.neighbor] * transition_prob(x, inc.neighbor, u)));
      }
    }
    // Reversibility: x_0 Q_0(X_t = v) = x_v Q_v(X_t = 0).
    double rev = 0.0, bound = 0.0;
    auto from_o = point_mass(ladder, o);
    std::vector<VertexDistribution> from_v;
    for (VertexId v = 0; v < nv; ++v) from_v.push_back(point_mass(ladder, v));
    for (int t = 1; t <= std::max(cfg.reversibility_steps, cfg.bound_steps); ++t) {
      from_o = evolve_distribution(x, from_o, 1);
      for (VertexId v = 0; v < nv; ++v) {
        if (t <= cfg.reversibility_steps) {
          from_v[v] = evolve_distribution(x, from_v[v], 1);
          rev = std::max(rev, std::fabs(xv[o] * from_o.probs[v] - xv[v] * from_v[v].probs[o]));
        }
        bound = std::max(bound, from_o.probs[v] - xv[v] / xv[o]);
      }
    }
    worst_db = std::max(worst_db, db);
    worst_rev = std::max(worst_rev, rev);
    worst_bound = std::max(worst_bound, bound);
    std::string ts_even = "", ts_odd = "", support = "";
    if (k < cfg.convergence_environments) {
      try {
        const auto qc = quenched_convergence_check(x, o, cfg.eps);
        ts_even = std::to_string(qc.t_star_even);
        ts_odd = std::to_string(qc.t_star_odd);
        support = qc.parity_support_exact ? "1" : "0";
        support_fail += !qc.parity_support_exact;
        if (k == 0) {
          io::CsvTable tv({"t", "tv_even", "tv_odd"});
          for (std::size_t t = 0; t < qc.tv_even.size(); ++t) {
            tv.row({std::to_string(t), format_double(qc.tv_even[t]), format_double(qc.tv_odd[t])});
          }
          tv_csv = tv.str();
        }
      } catch (const ConvergenceError& e) {
        ++conv_fail;
        ts_even = ts_odd = "none";
      }
    }
    table.row({std::to_string(k), format_double(db), format_double(rev), format_double(bound), ts_even,
               ts_odd, support});
  }
  rep.statistics["detailed_balance_max"] = worst_db;
  rep.statistics["reversibility_max"] = worst_rev;
  rep.statistics["bound_excess_max"] = worst_bound;
  rep.add("C2", "detailed balance within " + fmt(cfg.tolerance) + " on " + std::to_string(envs.size()) + " environments",
          worst_db <= cfg.tolerance, "max " + fmt(worst_db));
  rep.add("C2", "x_0 Q_0(X_t = v) = x_v Q_v(X_t = 0) for t <= " + std::to_string(cfg.reversibility_steps),
          worst_rev <= cfg.tolerance, "max " + fmt(worst_rev));
  rep.add("aux", "Q_0(X_t = v) <= x_v / x_0 for t <= " + std::to_string(cfg.bound_steps),
          worst_bound <= cfg.tolerance, "max excess " + fmt(worst_bound));
  const std::size_t nconv = std::min(cfg.convergence_environments, envs.size());
  rep.add("C3", "TV to x_even and x_odd below " + fmt(cfg.eps) + " on " + std::to_string(nconv) + " environments",
          conv_fail == 0 && nconv > 0, std::to_string(conv_fail) + " did not converge");
  rep.add("C3", "parity support exact at every step", support_fail == 0 && conv_fail == 0);
  rep.files["quenched.csv"] = table.str();
  if (!tv_csv.empty()) rep.files["quenched_tv.csv"] = tv_csv;
  return rep;
}

ExperimentReport gibbs_experiment(const GibbsConfig& cfg_in, double oracle_ratio) {
  GibbsConfig cfg = cfg_in;
  if (cfg.specs.empty()) cfg.specs = gibbs::toy_specs();
  if (cfg.limit_spec.g_right.empty()) cfg.limit_spec = gibbs::default_toy_spec();
  ExperimentReport rep;
  rep.experiment = "gibbs-toy";
  rep.config = {{"specs", cfg.specs.size()},
                {"limit_spec", json::parse(gibbs::spec_to_json_text(cfg.limit_spec))},
                {"max_n", cfg.max_n},
                {"limit_depths", cfg.limit_depths},
                {"tolerance", cfg.tolerance},
                {"brute_tolerance", cfg.brute_tolerance},
                {"rate_tolerance", cfg.rate_tolerance}};
  double worst_res = 0.0, worst_pair = 0.0, worst_brute = 0.0, worst_dlr = 0.0, worst_vol = 0.0;
  bool positive = true;
  io::CsvTable table({"spec", "S", "R", "L", "lambda", "gap", "residual", "brute", "dlr", "volume"});
  for (std::size_t i = 0; i < cfg.specs.size(); ++i) {
    const auto& spec = cfg.specs[i];
    const auto k = gibbs::kernel_from_spec(spec);
    const auto eig = gibbs::leading_eigenpair(k);
    const double res = std::max(eig.residual_left, eig.residual_right);
    double pair = 0.0;
    for (int s = 0; s < spec.slice_states; ++s) {
      positive = positive && eig.v[s] > 0.0 && eig.v_star[s] > 0.0;
      pair += eig.v[s] * eig.v_star[s];
    }
    pair = std::fabs(pair - 1.0);
    // Observables: indicator of the first slice (or the left state for l = 0)
    // and a generic function of every coordinate.
    double brute = 0.0;
    for (int n = 1; n <= cfg.max_n; ++n) {
      for (int l = 0; l < n; ++l) {
        const gibbs::Observable ind = [l](const gibbs::Configuration& c) {
          return l == 0 ? (c.left == 0 ? 1.0 : 0.0) : (c.slices[0] == 1 ? 1.0 : 0.0);
        };
        const gibbs::Observable gen = [](const gibbs::Configuration& c) {
          double v = 0.5 + c.left;
          for (std::size_t j = 0; j < c.slices.size(); ++j) v += std::sin(1.0 + c.slices[j] * (j + 2.0)) * (c.rungs[j] + 1);
          return v;
        };
        for (const auto& f : {ind, gen}) {
          const double a = gibbs::finite_volume_expectation(spec, eig, n, l, f);
          const double b = gibbs::brute_force_expectation(spec, n, l, f);
          brute = std::max(brute, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
        }
      }
    }
    // DLR on every boundary state for slice-pinning cylinders of [0, 2].
    double dlr = 0.0;
    const int n = 2;
    std::vector<gibbs::Cylinder> cylinders;
    cylinders.push_back({});
    for (int s = 0; s < spec.slice_states; ++s) {
      cylinders.push_back({-1, {s, -1}, {}});
      cylinders.push_back({-1, {-1, s}, {}});
    }
    cylinders.push_back({0, {}, {0, -1}});
    for (int b = 0; b < spec.slice_states; ++b) {
      for (const auto& c : cylinders) dlr = std::max(dlr, gibbs::dlr_check(spec, n, c.event(), b));
    }
    // Volume consistency: f on [0, 1] computed on [0, 1] and on [0, 2].
    const gibbs::Observable f1 = [](const gibbs::Configuration& c) { return c.slices[0] == 0 ? 2.0 : 0.5 * c.rungs[0]; };
    const double v1 = gibbs::infinite_volume_expectation(spec, eig, 1, f1);
    const double v2 = gibbs::infinite_volume_expectation(spec, eig, 2, f1);
    const double vol = std::fabs(v1 - v2);
    worst_res = std::max(worst_res, res);
    worst_pair = std::max(worst_pair, pair);
    worst_brute = std::max(worst_brute, brute);
    worst_dlr = std::max(worst_dlr, dlr);
    worst_vol = std::max(worst_vol, vol);
    table.row({std::to_string(i), std::to_string(spec.slice_states), std::to_string(spec.rung_states),
               std::to_string(spec.left_states), format_double(eig.lambda), format_double(eig.gap),
               format_double(res), format_double(brute), format_double(dlr), format_double(vol)});
  }
  rep.statistics["residual_max"] = worst_res;
  rep.statistics["pairing_max"] = worst_pair;
  rep.statistics["brute_force_max"] = worst_brute;
  rep.statistics["dlr_max"] = worst_dlr;
  rep.statistics["volume_max"] = worst_vol;
  rep.add("C11", "eigen-residuals below " + fmt(cfg.tolerance), worst_res < cfg.tolerance, "max " + fmt(worst_res));
  rep.add("C11", "eigenvectors positive and <v, v*> = 1", positive && worst_pair < cfg.tolerance,
          "max pairing error " + fmt(worst_pair));
  rep.add("C11", "finite volume equals brute force within " + fmt(cfg.brute_tolerance),
          worst_brute < cfg.brute_tolerance, "max " + fmt(worst_brute));
  rep.add("C11", "DLR residuals below " + fmt(cfg.tolerance), worst_dlr < cfg.tolerance, "max " + fmt(worst_dlr));
  rep.add("C11", "volume consistency within " + fmt(cfg.tolerance), worst_vol < cfg.tolerance, "max " + fmt(worst_vol));

  const gibbs::Observable f = [](const gibbs::Configuration& c) { return c.slices[0] == 0 ? 1.0 : 0.0; };
  const auto curve = gibbs::thermodynamic_limit_curve(cfg.limit_spec, 1, f, cfg.limit_depths);
  const double reference = oracle_ratio > 0.0 ? oracle_ratio : curve.spectral_ratio;
  io::CsvTable lim({"n", "gap"});
  for (std::size_t i = 0; i < curve.depths.size(); ++i) {
    lim.row({std::to_string(curve.depths[i]), format_double(curve.gaps[i])});
  }
  rep.statistics["limit_rate"] = curve.rate;
  rep.statistics["spectral_ratio_power"] = curve.spectral_ratio;
  rep.statistics["spectral_ratio_reference"] = reference;
  const double rel = curve.fitted ? std::fabs(curve.rate - reference) / reference : 1.0;
  rep.add("C11", "finite-volume gap decays at |lambda_2|/lambda within " + fmt(100 * cfg.rate_tolerance) + "%",
          curve.fitted && rel <= cfg.rate_tolerance,
          "rate " + fmt(curve.rate) + " vs " + fmt(reference) + " (relative " + fmt(rel) + ")");
  rep.files["gibbs_specs.csv"] = table.str();
  rep.files["gibbs_limit.csv"] = lim.str();
  return rep;
}

}  // namespace errw
