#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "errw/environment.hpp"
#include "errw/ladder.hpp"
#include "errw/replicas.hpp"

namespace errw::io {

using nlohmann::json;

/// {"tree": {...}, "depth": n | "unbounded", "v_start": label,
///  "rung_choice": [label, label]}
json ladder_descriptor(const LadderGraph& ladder);
LadderGraph ladder_from_descriptor(const json& j);

/// {seed, T, final_level, max_level, crossing_counts: [[edge, count], ...]}
json replica_record(const ReplicaSummary& r);

/// {ladder, normalization, weights: [[edge, x_e], ...]}; zero weights omitted.
json environment_record(const Environment& x);
Environment environment_from_record(const json& j, std::shared_ptr<const LadderGraph> ladder);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);
std::vector<json> read_jsonl(const std::filesystem::path& path);

/// Rows are written as given; the header fixes the column order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const { write_text(path, str()); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// (t, tv) rows.
CsvTable tv_curve_csv(const std::vector<double>& tv, std::uint64_t t0 = 0, std::uint64_t stride = 1);

/// Header block common to all manifests: generator family, uniform
/// conversion and seed derivation version.
json rng_manifest();

}  // namespace errw::io
