#include "errw/env_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "errw/io.hpp"
#include "errw/replicas.hpp"

namespace errw {

Environment occupation_fractions(std::shared_ptr<const LadderGraph> ladder, const EdgeCounts& counts) {
  if (counts.total == 0) throw std::invalid_argument("occupation_fractions: no steps recorded");
  const std::size_t ne = ladder->edge_count();
  if (counts.counts.size() > ne) throw std::invalid_argument("counts exceed the ladder");
  std::vector<double> w(ne, 0.0);
  const double t = static_cast<double>(counts.total);
  for (std::size_t e = 0; e < counts.counts.size(); ++e) w[e] = static_cast<double>(counts.counts[e]) / t;
  // Push the rounding residue onto the largest weight so the sum is 1 to
  // within one ulp.
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  auto big = std::max_element(w.begin(), w.end());
  *big += 1.0 - s;
  return Environment(std::move(ladder), std::move(w), Normalization::Simplex);
}

Environment to_reference(const Environment& x) {
  const double ref = x.weight(x.ladder().reference_edge());
  if (ref == 0.0) throw std::invalid_argument("to_reference: reference edge has weight 0");
  std::vector<double> w = x.weights();
  for (double& v : w) v /= ref;
  w[x.ladder().reference_edge()] = 1.0;
  return Environment(x.ladder_ptr(), std::move(w), Normalization::Reference);
}

Environment to_simplex(const Environment& x) {
  std::vector<double> w = x.weights();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("to_simplex: bad weight sum");
  for (double& v : w) v /= s;
  const double s2 = std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += 1.0 - s2;
  return Environment(x.ladder_ptr(), std::move(w), Normalization::Simplex);
}

std::vector<std::size_t> EnvironmentSample::fully_covered() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (coverage[i] == 0) out.push_back(i);
  }
  return out;
}

EnvironmentSample sample_environments(std::shared_ptr<const LadderGraph> ladder,
                                      const std::string& a_text, std::uint64_t horizon,
                                      std::uint64_t replicas, std::uint64_t master_seed,
                                      int threads) {
  if (!ladder->bounded()) throw std::invalid_argument("sample_environments needs a finite ladder");
  if (horizon == 0 || replicas == 0) throw std::invalid_argument("T and R must be positive");
  const Rational a_exact = parse_rational(a_text);
  if (a_exact <= 0) throw std::invalid_argument("a must be positive");
  ReplicaPlan plan;
  plan.a = a_exact.get_d();
  plan.horizon = horizon;
  plan.master_seed = master_seed;
  plan.keep_counts = true;
  auto runs = run_replicas(*ladder, plan, replicas, threads);

  EnvironmentSample s;
  s.ladder = ladder;
  s.meta = {a_text, plan.a, horizon, master_seed, replicas};
  const EdgeId ref = ladder->reference_edge();
  for (auto& r : runs) {
    if (r.counts.count(ref) == 0) {
      s.discarded.push_back(r.index);
      continue;
    }
    Environment x = occupation_fractions(ladder, r.counts);
    s.coverage.push_back(x.zero_edges());
    s.environments.push_back(std::move(x));
    s.replica_index.push_back(r.index);
    s.seeds.push_back(r.seed);
    s.final_vertex.push_back(r.final_vertex);
  }
  if (s.environments.empty()) {
    throw std::runtime_error("sample_environments: every replica missed the reference edge");
  }
  s.weights.assign(s.environments.size(), 1.0);
  return s;
}

namespace {

/// Reference-normalized weights grouped by edge level, one row per environment.
std::vector<std::vector<double>> reference_rows(const EnvironmentSample& sample) {
  std::vector<std::vector<double>> rows;
  rows.reserve(sample.size());
  for (const auto& x : sample.environments) rows.push_back(to_reference(x).weights());
  return rows;
}

std::vector<std::vector<EdgeId>> edges_by_level(const LadderGraph& ladder) {
  std::vector<std::vector<EdgeId>> out(static_cast<std::size_t>(*ladder.depth()) + 1);
  for (EdgeId e = 0; e < ladder.edge_count(); ++e) out[ladder.edge_level(e)].push_back(e);
  return out;
}

struct MedianFit {
  bool ok = false;
  stats::FitResult fit;
  std::vector<int> levels;
};

MedianFit fit_medians(const std::vector<std::vector<double>>& rows,
                      const std::vector<std::vector<EdgeId>>& by_level,
                      std::span<const std::size_t> idx, std::uint64_t min_count) {
  std::vector<double> xs, ys;
  MedianFit out;
  std::vector<double> vals;
  for (std::size_t level = 0; level < by_level.size(); ++level) {
    vals.clear();
    std::size_t positive = 0;
    for (std::size_t i : idx) {
      for (EdgeId e : by_level[level]) {
        vals.push_back(rows[i][e]);
        if (rows[i][e] > 0.0) ++positive;
      }
    }
    if (positive < min_count) continue;
    const double med = stats::median(vals);
    if (!(med > 0.0)) continue;
    xs.push_back(static_cast<double>(level));
    ys.push_back(std::log(med));
    out.levels.push_back(static_cast<int>(level));
  }
  if (xs.size() < 3) return out;
  out.fit = stats::linear_fit(xs, ys);
  out.ok = true;
  return out;
}

}  // namespace

DecayProfile decay_profile(const EnvironmentSample& sample, std::uint64_t min_count,
                           std::size_t bootstrap_replicates, std::uint64_t seed) {
  if (sample.size() == 0) throw std::invalid_argument("decay_profile: empty sample");
  const auto rows = reference_rows(sample);
  const auto by_level = edges_by_level(*sample.ladder);
  std::vector<std::size_t> all(sample.size());
  std::iota(all.begin(), all.end(), 0);

  DecayProfile p;
  p.min_count = min_count;
  const MedianFit main = fit_medians(rows, by_level, all, min_count);
  if (!main.ok) throw std::runtime_error("decay_profile: fewer than 3 levels with data");
  p.fit = main.fit;
  p.fit_levels = main.levels;
  p.c4 = -main.fit.slope;

  for (std::size_t level = 0; level < by_level.size(); ++level) {
    LevelSummary ls;
    ls.level = static_cast<int>(level);
    std::vector<double> vals;
    const double threshold = std::exp(-p.c4 * static_cast<double>(level) / 2.0);
    for (const auto& row : rows) {
      for (EdgeId e : by_level[level]) {
        vals.push_back(row[e]);
        if (row[e] > 0.0) ++ls.positive;
        if (row[e] > threshold) ++ls.exceed;
      }
    }
    ls.values = vals.size();
    ls.q10 = stats::quantile(vals, 0.10);
    ls.q25 = stats::quantile(vals, 0.25);
    ls.median = stats::quantile(vals, 0.50);
    ls.q75 = stats::quantile(vals, 0.75);
    ls.q90 = stats::quantile(vals, 0.90);
    ls.exceed_freq = static_cast<double>(ls.exceed) / static_cast<double>(ls.values);
    ls.exceed_ci = stats::binomial_ci(ls.exceed, ls.values);
    p.levels.push_back(ls);
  }

  std::vector<double> boot;
  p.bootstrap_replicates = bootstrap_replicates;
  stats::bootstrap(sample.size(), bootstrap_replicates, seed, [&](std::span<const std::size_t> idx) {
    const MedianFit f = fit_medians(rows, by_level, idx, min_count);
    if (f.ok) {
      boot.push_back(-f.fit.slope);
    } else {
      ++p.bootstrap_failures;
    }
    return 0.0;
  });
  if (boot.empty()) throw std::runtime_error("decay_profile: every bootstrap fit failed");
  p.c4_ci = stats::percentile_interval(boot);
  return p;
}

LogRatioTail log_ratio_tail(const EnvironmentSample& sample, EdgeId e, EdgeId f,
                            const std::vector<double>& thresholds, std::uint64_t min_count) {
  if (thresholds.empty()) throw std::invalid_argument("log_ratio_tail: no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("log_ratio_tail: thresholds must increase");
  }
  LogRatioTail out;
  out.e = e;
  out.f = f;
  std::vector<double> logs;
  for (const auto& x : sample.environments) {
    const double xe = x.weight(e), xf = x.weight(f);
    if (xe > 0.0 && xf > 0.0) {
      logs.push_back(std::fabs(std::log(xe / xf)));
    } else {
      ++out.excluded;
    }
  }
  if (logs.empty()) throw std::runtime_error("log_ratio_tail: no replica crossed both edges");
  out.contributing = logs.size();
  auto& c = out.curve;
  c.thresholds = thresholds;
  c.trials = logs.size();
  for (double m : thresholds) {
    std::uint64_t k = 0;
    for (double l : logs) {
      if (l >= m) ++k;
    }
    c.hits.push_back(k);
    c.survival.push_back(static_cast<double>(k) / static_cast<double>(c.trials));
    c.ci.push_back(stats::binomial_ci(k, c.trials));
  }
  std::size_t usable = 0;
  for (auto k : c.hits) usable += k >= min_count && k > 0;
  if (usable >= 2) {
    out.fit = stats::loglinear_fit(c.thresholds, c.survival, c.hits, min_count);
    out.fitted = true;
  }
  return out;
}

Reweighting conditional_reweight(const EnvironmentSample& sample, const PathRecord& path,
                                 const Rational& a) {
  if (path.vertices.empty() || path.front() != sample.ladder->start()) {
    throw std::invalid_argument("conditional_reweight: path must start at the origin");
  }
  Reweighting out;
  out.path = path;
  out.exact = path_probability_exact(*sample.ladder, a, path);
  if (out.exact <= 0) throw std::invalid_argument("conditional_reweight: path has probability 0");
  const double p0 = out.exact.get_d();
  std::vector<double> raw(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    raw[i] = path_probability(sample.environments[i], path) / p0;
    if (raw[i] == 0.0) ++out.zero_weight;
  }
  out.raw_mean = stats::mean(raw);
  out.raw_se = sample.size() > 1 ? stats::standard_error(raw) : 0.0;
  if (!(out.raw_mean > 0.0)) throw std::runtime_error("conditional_reweight: all weights vanish");
  out.weighted = sample;
  for (std::size_t i = 0; i < raw.size(); ++i) out.weighted.weights[i] = raw[i] / out.raw_mean;
  return out;
}

WeightedEstimate weighted_path_probability(const EnvironmentSample& sample, const PathRecord& path) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("weighted_path_probability: empty sample");
  std::vector<double> q(n);
  double sw = 0.0, swq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = path_probability(sample.environments[i], path);
    sw += sample.weights[i];
    swq += sample.weights[i] * q[i];
  }
  WeightedEstimate est;
  est.mean = swq / sw;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sample.weights[i] * (q[i] - est.mean);
    ss += d * d;
  }
  est.se = std::sqrt(ss) / sw;
  return est;
}

std::vector<double> occupation_stability(std::shared_ptr<const LadderGraph> ladder, double a,
                                         const std::vector<std::uint64_t>& horizons,
                                         std::uint64_t replicas, std::uint64_t master_seed,
                                         int threads) {
  if (horizons.size() < 2 || !std::is_sorted(horizons.begin(), horizons.end()) || horizons[0] == 0) {
    throw std::invalid_argument("occupation_stability: need increasing positive horizons");
  }
  const std::size_t pairs = horizons.size() - 1;
  std::vector<std::vector<double>> dist(replicas, std::vector<double>(pairs));
  const auto n = static_cast<std::int64_t>(replicas);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(derive_replica_seed(master_seed, static_cast<std::uint64_t>(i)));
    ReinforcementState state(*ladder, a, ladder->start());
    RunOptions opts;
    opts.keep_path = false;
    std::vector<double> prev;
    std::uint64_t t = 0;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      run(state, horizons[h] - t, rng, opts);
      t = horizons[h];
      auto cur = occupation_fractions(ladder, state.counts()).weights();
      if (h > 0) {
        double l1 = 0.0;
        for (std::size_t e = 0; e < cur.size(); ++e) l1 += std::fabs(cur[e] - prev[e]);
        dist[i][h - 1] = l1;
      }
      prev = std::move(cur);
    }
  }
  std::vector<double> out(pairs, 0.0);
  for (std::size_t k = 0; k < pairs; ++k) {
    for (const auto& d : dist) out[k] += d[k];
    out[k] /= static_cast<double>(replicas);
  }
  return out;
}

void save_sample(const EnvironmentSample& sample, const std::string& dir) {
  std::filesystem::create_directories(dir);
  io::json meta;
  meta["ladder"] = io::ladder_descriptor(*sample.ladder);
  meta["a"] = sample.meta.a_text;
  meta["T"] = sample.meta.horizon;
  meta["master_seed"] = sample.meta.master_seed;
  meta["replicas"] = sample.meta.replicas;
  meta["discarded"] = sample.discarded;
  meta["rng"] = io::rng_manifest();
  io::write_json(std::filesystem::path(dir) / "meta.json", meta);
  std::vector<io::json> lines;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    io::json j = io::environment_record(sample.environments[i]);
    j["replica"] = sample.replica_index[i];
    j["seed"] = sample.seeds[i];
    j["coverage"] = sample.coverage[i];
    j["final_vertex"] = sample.final_vertex[i];
    j["importance_weight"] = sample.weights[i];
    lines.push_back(std::move(j));
  }
  io::write_jsonl(std::filesystem::path(dir) / "environments.jsonl", lines);
}

EnvironmentSample load_sample(const std::string& dir) {
  const auto meta = io::json::parse(io::read_text(std::filesystem::path(dir) / "meta.json"));
  EnvironmentSample s;
  s.ladder = std::make_shared<const LadderGraph>(io::ladder_from_descriptor(meta.at("ladder")));
  s.meta.a_text = meta.at("a").get<std::string>();
  s.meta.a = parse_rational(s.meta.a_text).get_d();
  s.meta.horizon = meta.at("T").get<std::uint64_t>();
  s.meta.master_seed = meta.at("master_seed").get<std::uint64_t>();
  s.meta.replicas = meta.at("replicas").get<std::uint64_t>();
  s.discarded = meta.at("discarded").get<std::vector<std::uint64_t>>();
  for (const auto& j : io::read_jsonl(std::filesystem::path(dir) / "environments.jsonl")) {
    s.environments.push_back(io::environment_from_record(j, s.ladder));
    s.replica_index.push_back(j.at("replica").get<std::uint64_t>());
    s.seeds.push_back(j.at("seed").get<std::uint64_t>());
    s.coverage.push_back(j.at("coverage").get<std::size_t>());
    s.final_vertex.push_back(j.at("final_vertex").get<VertexId>());
    s.weights.push_back(j.at("importance_weight").get<double>());
  }
  return s;
}

}  // namespace errw
