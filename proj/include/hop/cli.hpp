#ifndef HOP_CLI_HPP
#define HOP_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hop::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kManifestSchema = "hoplab.manifest/1";
inline constexpr const char* kResultsSchema = "hoplab.results/1";
inline constexpr const char* kOutEnv = "HOPLAB_OUT";

enum ExitCode { kOk = 0, kConfigError = 1, kInvariantViolation = 2 };

struct RunConfig {
  std::string command;  // spike | local | smallest | ns | bounds-check | bm-oracle | diag
  std::string spec = "dyson-gamma:1";
  std::uint64_t seed = 1;
  std::int64_t trials = 1000;
  unsigned workers = 1;
  std::string out;
  bool cross_check = false;

  double K = 3;
  std::int64_t n = 0;  // 0: command default
  std::optional<double> log_eps;  // spike: fixes n via K

  double delta = 0.5;  // bounds-check
  std::optional<double> log_lambda;
  bool exhaustive = false;

  double log_eps_max = -9;  // ns
  double log_eps_min = -37;
  int eps_points = 6;
  std::vector<double> log_eps_list;

  std::vector<double> t_grid{1.0};  // local
  std::vector<double> eta_grid{1.0};
  std::int64_t oracle_trials = 0;

  std::vector<double> sigma2{0.25, 1.0, 4.0};  // bm-oracle
  std::string method = "exact";
  double dt = 0.01;
  double eta = 1;
  double t = 1;
  double tail_sigma2 = 4;
  int m_max = 6;
  std::int64_t tail_trials = 100000;
  double sup_x = 1;
  double bridge_dt = 1e-3;
  std::int64_t bridge_paths = 20000;

  std::string diag = "moments";  // moments | correlation | bigweight | variance
  std::vector<std::int64_t> n_grid{100, 1000, 10000, 100000};
  int max_lag = 20;
  std::int64_t window = 1000;
};

nlohmann::json to_json(const RunConfig& c);

/// Strict conversion: unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);

/// Command-specific range checks; raises ConfigError.
void validate(const RunConfig& c);

/// Executes one command, writing manifest.json, results.json and CSV tables
/// into the output directory. Returns an ExitCode.
int run(const RunConfig& c, std::ostream& log);

/// Re-runs the configuration stored in a manifest and compares results.json
/// byte for byte. `overrides` may set seed, workers and out.
int replay(const std::string& manifest_path, const nlohmann::json& overrides, std::ostream& log);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace hop::cli

#endif  // HOP_CLI_HPP
