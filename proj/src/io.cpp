#include "errw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errw/rng.hpp"

namespace errw::io {

json ladder_descriptor(const LadderGraph& ladder) {
  const auto& tree = ladder.tree();
  json j;
  j["tree"] = json::parse(tree_to_json_text(tree));
  if (ladder.bounded()) {
    j["depth"] = *ladder.depth();
  } else {
    j["depth"] = "unbounded";
  }
  j["v_start"] = tree.label(ladder.start_site());
  const auto [u, v] = tree.edges()[ladder.rung_choice()];
  j["rung_choice"] = json::array({tree.label(u), tree.label(v)});
  return j;
}

LadderGraph ladder_from_descriptor(const json& j) {
  FiniteTree tree = tree_from_json_text(j.at("tree").dump());
  std::optional<int> depth;
  if (!j.at("depth").is_string()) depth = j.at("depth").get<int>();
  std::optional<int> start, rung;
  if (j.contains("v_start")) start = tree.index_of(j["v_start"].get<long>());
  if (j.contains("rung_choice")) {
    const int a = tree.index_of(j["rung_choice"].at(0).get<long>());
    const int b = tree.index_of(j["rung_choice"].at(1).get<long>());
    for (int e = 0; e < tree.edge_count(); ++e) {
      const auto [u, v] = tree.edges()[e];
      if ((u == a && v == b) || (u == b && v == a)) rung = e;
    }
    if (!rung) throw std::invalid_argument("rung_choice is not a tree edge");
  }
  return LadderGraph(std::move(tree), depth, start, rung);
}

json replica_record(const ReplicaSummary& r) {
  json j;
  j["seed"] = r.seed;
  j["T"] = r.horizon;
  j["final_level"] = r.final_level;
  j["max_level"] = r.max_level;
  json counts = json::array();
  for (std::size_t e = 0; e < r.counts.counts.size(); ++e) {
    if (r.counts.counts[e] != 0) counts.push_back(json::array({e, r.counts.counts[e]}));
  }
  j["crossing_counts"] = std::move(counts);
  return j;
}

json environment_record(const Environment& x) {
  json j;
  j["ladder"] = ladder_descriptor(x.ladder());
  j["normalization"] = to_string(x.normalization());
  json w = json::array();
  for (std::size_t e = 0; e < x.weights().size(); ++e) {
    if (x.weights()[e] != 0.0) w.push_back(json::array({e, x.weights()[e]}));
  }
  j["weights"] = std::move(w);
  return j;
}

Environment environment_from_record(const json& j, std::shared_ptr<const LadderGraph> ladder) {
  std::vector<double> w(ladder->edge_count(), 0.0);
  for (const auto& entry : j.at("weights")) {
    const auto e = entry.at(0).get<std::size_t>();
    if (e >= w.size()) throw std::invalid_argument("environment record names an unknown edge");
    w[e] = entry.at(1).get<double>();
  }
  return Environment(std::move(ladder), std::move(w),
                     normalization_from_string(j.at("normalization").get<std::string>()));
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::string text;
  for (const auto& r : records) {
    text += r.dump();
    text += '\n';
  }
  write_text(path, text);
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> out;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("csv row width mismatch");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string s;
  auto line = [&s](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return s;
}

CsvTable tv_curve_csv(const std::vector<double>& tv, std::uint64_t t0, std::uint64_t stride) {
  CsvTable t({"t", "tv"});
  for (std::size_t i = 0; i < tv.size(); ++i) {
    t.row({std::to_string(t0 + i * stride), format_double(tv[i])});
  }
  return t;
}

json rng_manifest() {
  return {{"generator", kGeneratorFamily},
          {"uniform", kUniformConversion},
          {"seed_derivation", kSeedDerivation}};
}

}  // namespace errw::io
