#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "errw/cli.hpp"
#include "errw/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("ERRW_TEST_TMP");
  const fs::path p = (root ? fs::path(root) : fs::temp_directory_path() / "errw_cli") / name;
  fs::remove_all(p);
  return p;
}

struct Result {
  int code;
  std::string out, err;
};

Result lab(std::vector<std::string> args) {
  args.insert(args.begin(), "errw_lab");
  std::ostringstream out, err;
  const int code = errw::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(lab({}).code == 2);
  const auto missing = lab({"tails", "--out", scratch("missing").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("--a") != std::string::npos);
  CHECK(lab({"tails", "--a", "abc", "--out", scratch("bad_a").string()}).code == 2);
  CHECK(lab({"tails", "--a", "-1", "--out", scratch("neg_a").string()}).code == 2);
  CHECK(lab({"tails", "--a", "2", "--depth", "deep", "--out", scratch("bad_depth").string()}).code == 2);
  CHECK(lab({"quenched", "--preset", "cube-2", "--out", scratch("bad_preset").string()}).code == 2);
  CHECK(lab({"decay", "--sample", "/nonexistent/sample"}).code == 2);
  CHECK(lab({"tails", "--a", "2", "--config", "/nonexistent.json"}).code == 2);
  CHECK(lab({"frobnicate"}).code == 2);
  const auto help = lab({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("exchangeability") != std::string::npos);
}

TEST_CASE("exchangeability example") {
  const auto dir = scratch("exch");
  const auto r = lab({"exchangeability", "--preset", "segment-2", "--depth", "2", "--a", "1", "--max-length", "8",
                      "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS C1") != std::string::npos);
  const auto report = nlohmann::json::parse(errw::io::read_text(dir / "report.json"));
  CHECK(report["passed"] == true);
  const auto manifest = nlohmann::json::parse(errw::io::read_text(dir / "manifest.json"));
  CHECK(manifest["command"] == "exchangeability");
  CHECK(manifest["rng"]["generator"] == "mt19937_64");
  CHECK(manifest["argv"].size() == 12);
}

TEST_CASE("results do not depend on the thread count") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> base{"tails", "--a", "2", "--depth", "12", "--t", "200", "2000",
                                      "--replicas", "300", "--seed", "42"};
  auto run_with = [&](const fs::path& dir, const std::string& threads) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
    return lab(args).code;
  };
  const int ca = run_with(a, "1");
  const int cb = run_with(b, "3");
  CHECK(ca == cb);
  for (const char* f : {"report.json", "tails.csv", "summary.txt"}) {
    CHECK(errw::io::read_text(a / f) == errw::io::read_text(b / f));
  }
}

TEST_CASE("config files fill options the command line leaves out") {
  const auto dir = scratch("cfg");
  const auto cfg = dir / "run.json";
  errw::io::write_json(cfg, nlohmann::json{{"config",
                                            {{"a", "3/2"}, {"t", {100, 1000}}, {"replicas", 50},
                                             {"depth", "8"}, {"seed", 5}}}});
  const auto r = lab({"range", "--config", cfg.string(), "--replicas", "40", "--out", (dir / "out").string()});
  CHECK(r.code != 2);
  const auto m = nlohmann::json::parse(errw::io::read_text(dir / "out" / "manifest.json"));
  CHECK(m["config"]["replicas"] == "40");
  CHECK(m["config"]["a"] == "3/2");
  CHECK(m["config"]["depth"] == "8");
  CHECK(m["master_seed"] == 5);
}

TEST_CASE("default output directory from the environment") {
  const auto dir = scratch("envdir");
  setenv("ERRW_OUTPUT_DIR", dir.string().c_str(), 1);
  const auto r = lab({"simulate", "--a", "1", "--steps", "100", "--replicas", "4", "--depth", "5"});
  unsetenv("ERRW_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(errw::io::read_jsonl(dir / "replicas.jsonl").size() == 4);
}

TEST_CASE("simulate warns at or below the threshold") {
  const auto r = lab({"simulate", "--a", "3/4", "--steps", "10", "--out", scratch("warn").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("sample pipeline") {
  const auto dir = scratch("pipeline");
  CHECK(lab({"environments", "--a", "1", "--depth", "1", "--steps", "20000", "--replicas", "60", "--out",
             dir.string()})
            .code == 0);
  const auto sample = (dir / "sample").string();
  const auto mix = lab({"mixture", "--sample", sample, "--bootstrap", "100", "--out", (dir / "mix").string()});
  CHECK(mix.code != 2);
  CHECK(mix.out.find("C4") != std::string::npos);
  CHECK(mix.out.find("C5") != std::string::npos);
  const auto q = lab({"quenched", "--sample", sample, "--environments", "5", "--out", (dir / "q").string()});
  CHECK(q.code != 2);
}

TEST_CASE("gibbs toy models") {
  const auto r = lab({"gibbs-toy", "--max-n", "3", "--out", scratch("gibbs").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS C11") != std::string::npos);
}
