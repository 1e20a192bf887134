#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hop/cli.hpp"
#include "hop/errors.hpp"

namespace fs = std::filesystem;
using namespace hop;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "hoplab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path("cli-scratch") / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config round trip and strict keys") {
  cli::RunConfig c;
  c.command = "spike";
  c.K = 4;
  c.log_lambda = -30;
  const auto back = cli::config_from_json(cli::to_json(c));
  CHECK(back.K == 4);
  CHECK(back.log_lambda.value() == -30);
  CHECK_FALSE(back.log_eps.has_value());
  CHECK_THROWS_AS(cli::config_from_json(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(cli::config_from_json(json{{"K", "three"}}), ConfigError);
}

TEST_CASE("validation catches bad ranges") {
  cli::RunConfig c;
  c.command = "spike";
  CHECK_NOTHROW(cli::validate(c));
  c.trials = 0;
  CHECK_THROWS_AS(cli::validate(c), ConfigError);
  c = {};
  c.command = "nope";
  CHECK_THROWS_AS(cli::validate(c), ConfigError);
  c = {};
  c.command = "bounds-check";
  c.delta = 1.5;
  CHECK_THROWS_AS(cli::validate(c), ConfigError);
}

TEST_CASE("exit codes for bad input") {
  CHECK(run_args({"spike", "--spec", "two-point:0.5", "--out", scratch("bad").string()}) == 1);
  CHECK(run_args({"spike", "--trials", "x"}) == 1);
  CHECK(run_args({"frobnicate"}) == 1);
  const fs::path cfg = "cli-scratch-bad.json";
  std::ofstream(cfg) << R"({"spec": "dyson-gamma:1", "colour": 3})";
  CHECK(run_args({"spike", "--config", cfg.string()}) == 1);
  fs::remove(cfg);
}

TEST_CASE("spike run writes manifest, results and csv") {
  const auto out = scratch("spike");
  REQUIRE(run_args({"spike", "--spec", "dyson-gamma:1", "-n", "101", "--trials", "20", "--seed",
                    "5", "--out", out.string()}) == 0);
  const auto manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["schema"] == cli::kManifestSchema);
  CHECK(manifest["config"]["n"] == 101);
  CHECK(manifest.contains("wall_time_seconds"));
  const auto results = json::parse(slurp(out / "results.json"));
  CHECK(results["results"]["n"] == 101);
  CHECK_FALSE(results["config"].contains("workers"));
  CHECK(fs::exists(out / "spike.csv"));
}

TEST_CASE("config file with flag override") {
  const auto out = scratch("cfg");
  const fs::path cfg = "cli-scratch-cfg.json";
  std::ofstream(cfg) << R"({"spec": "two-point:0.9", "n": 51, "trials": 5, "K": 3})";
  REQUIRE(run_args({"spike", "--config", cfg.string(), "--trials", "7", "--out", out.string()}) == 0);
  const auto results = json::parse(slurp(out / "results.json"));
  CHECK(results["results"]["trials"] == 7);
  CHECK(results["results"]["n"] == 51);
  fs::remove(cfg);
}

TEST_CASE("replay reproduces across worker counts") {
  const auto out = scratch("replay-src");
  REQUIRE(run_args({"bounds-check", "--spec", "two-point:0.9", "-n", "31", "--trials", "30",
                    "--workers", "1", "--out", out.string()}) == 0);
  const auto again = scratch("replay-dst");
  std::ostringstream log;
  CHECK(cli::replay((out / "manifest.json").string(), {{"workers", 8}, {"out", again.string()}},
                    log) == 0);
  CHECK(slurp(out / "results.json") == slurp(again / "results.json"));
  CHECK(json::parse(slurp(again / "replay.json"))["identical"] == true);

  const auto other = scratch("replay-seed");
  CHECK(cli::replay((out / "manifest.json").string(), {{"seed", 99}, {"out", other.string()}},
                    log) == 0);
  const auto rep = json::parse(slurp(other / "replay.json"));
  CHECK(rep["seed_overridden"] == true);
  CHECK(rep["identical"] == false);
}

TEST_CASE("replay flags a version mismatch") {
  const auto out = scratch("replay-ver");
  REQUIRE(run_args({"diag", "--kind", "variance", "--spec", "lognormal:0.5", "--out",
                    out.string()}) == 0);
  auto manifest = json::parse(slurp(out / "manifest.json"));
  manifest["version"] = "0.0.1";
  std::ofstream(out / "manifest.json") << manifest.dump(2);
  const auto dst = scratch("replay-ver2");
  std::ostringstream log;
  CHECK(cli::replay((out / "manifest.json").string(), {{"out", dst.string()}}, log) == 0);
  CHECK(log.str().find("warning") != std::string::npos);
  CHECK(json::parse(slurp(dst / "replay.json"))["reproducible"] == false);
}

TEST_CASE("exhaustive bounds check") {
  const auto out = scratch("exh");
  REQUIRE(run_args({"bounds-check", "--spec", "two-point:0.9", "-n", "7", "--exhaustive",
                    "--delta", "0.5", "--out", out.string()}) == 0);
  const auto r = json::parse(slurp(out / "results.json"))["results"];
  CHECK(r["instances"] == 128);
  CHECK(r["count_disagreements"] == 0);
}

TEST_CASE("default output directory from the environment") {
  cli::RunConfig c;
  c.command = "diag";
  c.diag = "variance";
  c.spec = "dyson-gamma:1";
  std::ostringstream log;
  CHECK(cli::run(c, log) == 0);
  if (const char* env = std::getenv(cli::kOutEnv))
    CHECK(fs::exists(fs::path(env) / "diag" / "results.json"));
}
