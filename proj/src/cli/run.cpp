#include "hop/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hop/brownian.hpp"
#include "hop/crossings.hpp"
#include "hop/errors.hpp"
#include "hop/estimators.hpp"
#include "hop/parallel.hpp"
#include "hop/transfer.hpp"
#include "hop/weights.hpp"

namespace hop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"spike", "local", "smallest", "ns",
                                      "bounds-check", "bm-oracle", "diag"};

json est(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}, {"trials", e.trials}};
}

json fit(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr}};
}

json law(const IntLaw& l) {
  json j = json::object();
  for (const auto& [k, v] : l) j[std::to_string(k)] = v;
  return j;
}

template <class T>
void get(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& into) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) { into.reset(); return; }
  T v{};
  get(j, key, v);
  into = v;
}

fs::path output_dir(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return fs::path(env) / c.command;
  return fs::path("hoplab-out") / c.command;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << std::setprecision(17);
  return os;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes a weight sequence in the empirical-file format so that it can be
// fed back with --spec empirical-file:<path>.
void dump_weights(const fs::path& p, const std::vector<double>& w, const std::string& origin) {
  auto os = open_out(p);
  os << "# " << origin << "\n";
  for (double x : w) os << x << "\n";
}

std::vector<double> to_vector(const Eigen::ArrayXd& a) { return {a.data(), a.data() + a.size()}; }

RunOptions options(const RunConfig& c) { return {c.workers, c.cross_check}; }

// ---- commands ----

json cmd_spike(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir) {
  Eigen::Index n = c.n;
  if (c.log_eps) n = spike_n_for(c.K, *c.log_eps);
  if (n == 0) n = 9999;
  const auto e = spike_estimate(spec, c.K, n, c.trials, c.seed, options(c));
  auto os = open_out(dir / "spike.csv");
  write_spike_csv(os, e);
  return {{"spec", e.spec},
          {"K", e.K},
          {"n", e.n},
          {"log_eps", e.log_eps},
          {"trials", e.trials},
          {"mu", est(e.mu)},
          {"vhat", est(e.vhat)},
          {"sigma2_ref", e.sigma2_ref},
          {"nudges", e.nudges},
          {"cross_checked", e.cross_checked},
          {"normalization", "n+1"}};
}

json cmd_local(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir) {
  const Eigen::Index n = c.n ? c.n : 4001;
  const auto r = local_stats(spec, n, c.t_grid, c.eta_grid, c.trials, c.seed, options(c),
                             c.oracle_trials);
  auto os = open_out(dir / "local.csv");
  write_local_csv(os, r);
  json cells = json::array();
  for (const auto& cell : r.cells)
    cells.push_back({{"t", cell.t}, {"eta", cell.eta}, {"m", cell.m}, {"tv", cell.tv},
                     {"empirical", law(cell.empirical)}, {"oracle", law(cell.oracle)}});
  return {{"spec", r.spec}, {"n", r.n}, {"trials", r.trials}, {"oracle_trials", r.oracle_trials},
          {"sigma2", r.sigma2}, {"max_tv", r.max_tv()},
          {"monotone_violations", r.monotone_violations}, {"cells", cells}};
}

json cmd_smallest(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir) {
  const Eigen::Index n = c.n ? c.n : 4001;
  const auto r = smallest_eig_law(spec, n, c.trials, c.seed, options(c));
  auto os = open_out(dir / "smallest.csv");
  write_smallest_csv(os, r);
  return {{"spec", r.spec}, {"n", r.n}, {"sigma", r.sigma}, {"trials", r.samples.size()},
          {"ks", r.ks}, {"median", r.median}, {"oracle_median", r.sigma * sup_abs_quantile(0.5)},
          {"bracket_enlarged", r.bracket_enlarged}};
}

json cmd_ns(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir) {
  const auto grid = c.log_eps_list.empty() ? log_eps_grid(c.log_eps_max, c.log_eps_min, c.eps_points)
                                           : c.log_eps_list;
  const auto e = novikov_shubin(spec, grid, c.K, c.trials, c.seed, options(c));
  auto os = open_out(dir / "ns.csv");
  write_ns_csv(os, e);
  json pts = json::array();
  for (const auto& p : e.points)
    pts.push_back({{"log_eps", p.log_eps}, {"n", p.n}, {"mu", est(p.mu)}});
  return {{"spec", e.spec}, {"K", e.K}, {"points", pts}, {"alpha_hat", fit(e.power)},
          {"spike_fit", fit(e.spike)}, {"local_alpha", e.local_alpha},
          {"zero_points", e.zero_points}};
}

json cmd_bounds(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir,
                int& status) {
  const Eigen::Index n = c.n ? c.n : (c.exhaustive ? 15 : 1001);
  if (n % 2 == 0) throw ConfigError("bounds-check: n must be odd");
  double log_lambda = 0;
  if (c.log_lambda) {
    log_lambda = *c.log_lambda;
  } else {
    const double premise = (2.0 / c.delta) * std::log(c.delta / (16.0 * double(n)));
    log_lambda = std::min(-std::sqrt(double(n)), premise - 1.0);
  }
  const SignedLog lambda = SignedLog::from_log(log_lambda);

  std::uint64_t instances = c.trials;
  if (c.exhaustive) {
    if (spec.kind != WeightKind::TwoPoint) throw ConfigError("--exhaustive needs a two-point spec");
    if (n > 24) throw ConfigError("--exhaustive supports n <= 24");
    instances = std::uint64_t{1} << n;
  }
  auto instance = [&](std::uint64_t i) {
    if (!c.exhaustive) return sample(spec, n, i);
    Eigen::ArrayXd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v[k] = ((i >> k) & 1) ? 2 * spec.p - 1 : 1.0;
    return WeightSequence::from_values(v, {spec.label() + " pattern", 0, i});
  };

  struct Row {
    SandwichReport s;
    ProcessSandwich p;
  };
  const auto rows = map_trials(instances, c.workers, [&](std::uint64_t i) {
    const auto w = instance(i);
    return Row{check_sandwich(w, lambda, c.delta), process_sandwich(w, lambda, std::min(c.delta, 1.0))};
  });

  auto os = open_out(dir / "sandwich.csv");
  write_sandwich_csv_header(os);
  std::int64_t premise_M = 0, premise_J = 0, viol_M = 0, viol_up = 0, viol_lo = 0, disagree = 0,
               proc_checked = 0, proc_viol = 0, informational = 0;
  std::vector<std::uint64_t> offending;
  for (std::uint64_t i = 0; i < rows.size(); ++i) {
    const auto& s = rows[i].s;
    write_sandwich_csv_row(os, s, i);
    bool bad = false;
    if (s.premise_M) {
      ++premise_M;
      if (!s.holds_M) { ++viol_M; bad = true; }
    } else if (!s.holds_M) {
      ++informational;
    }
    if (s.premise_upper && s.premise_lower) ++premise_J;
    if (s.premise_upper && !s.holds_upper) { ++viol_up; bad = true; }
    if (s.premise_lower && !s.holds_lower) { ++viol_lo; bad = true; }
    if (!s.counts_agree) { ++disagree; bad = true; }
    const auto& p = rows[i].p;
    if (p.premise_ok) {
      ++proc_checked;
      if (p.lower_violations + p.upper_violations > 0) { ++proc_viol; bad = true; }
    }
    if (bad) offending.push_back(i);
  }
  if (!offending.empty()) {
    status = kInvariantViolation;
    fs::create_directories(dir / "violations");
    for (std::size_t j = 0; j < std::min<std::size_t>(offending.size(), 20); ++j) {
      const auto w = instance(offending[j]);
      dump_weights(dir / "violations" / ("instance_" + std::to_string(offending[j]) + ".txt"),
                   to_vector(w.values), spec.label() + " instance " + std::to_string(offending[j]));
    }
  }
  return {{"spec", spec.label()}, {"n", n}, {"delta", c.delta}, {"log_lambda", log_lambda},
          {"exhaustive", c.exhaustive}, {"instances", instances},
          {"premise_M_instances", premise_M}, {"premise_J_instances", premise_J},
          {"violations_M", viol_M}, {"violations_upper", viol_up}, {"violations_lower", viol_lo},
          {"count_disagreements", disagree}, {"informational_M_violations", informational},
          {"process_checked", proc_checked}, {"process_violations", proc_viol},
          {"offending", offending}};
}

json cmd_bm(const RunConfig& c, const fs::path& dir) {
  RenewalMethod method = RenewalMethod::Exact;
  if (c.method == "mesh") method = RenewalMethod::Mesh;
  else if (c.method != "exact") throw ConfigError("bm-oracle: method must be exact or mesh");

  json renewal = json::array();
  auto os = open_out(dir / "renewal.csv");
  write_renewal_csv_header(os);
  for (std::size_t i = 0; i < c.sigma2.size(); ++i) {
    const auto r = renewal_rate(c.sigma2[i], c.K, c.trials, mix_seed(c.seed, i), method, c.dt,
                                c.workers);
    write_renewal_csv_row(os, r);
    renewal.push_back({{"sigma2", r.sigma2}, {"K", r.K}, {"method", c.method}, {"rate", est(r.rate)},
                       {"target", r.sigma2}, {"pre_asymptotic", r.pre_asymptotic}});
  }

  const auto tail = tail_check(c.eta, c.t, c.tail_sigma2, c.m_max, c.tail_trials,
                               stream_seed(c.seed, "tail"), c.workers);
  auto ts = open_out(dir / "tail.csv");
  write_tail_csv(ts, tail);
  json rows = json::array();
  for (const auto& r : tail.rows)
    rows.push_back({{"m", r.m}, {"p", r.p}, {"stderr", r.std_error}, {"envelope", r.envelope}});

  json sup = {{"x", c.sup_x}, {"cdf_theta", sup_abs_cdf_theta(c.sup_x)},
              {"sf_images", sup_abs_sf_images(c.sup_x)}, {"sf", sup_abs_sf(c.sup_x)}};
  if (c.bridge_paths > 0)
    sup["bridge"] = est(bridge_exceedance(c.sup_x, c.bridge_dt, c.bridge_paths,
                                          stream_seed(c.seed, "bridge"), c.workers));

  return {{"renewal", renewal},
          {"tail", {{"eta", tail.eta}, {"t", tail.t}, {"sigma2", tail.sigma2},
                    {"trials", tail.trials}, {"a", tail.a}, {"b", tail.b}, {"fitted", tail.fitted},
                    {"below_envelope", tail.below_envelope}, {"concave", tail.concave},
                    {"rows", rows}}},
          {"sup_abs", sup}};
}

json cmd_diag(const RunConfig& c, const WeightProcessSpec& spec, const fs::path& dir) {
  const std::vector<Eigen::Index> grid(c.n_grid.begin(), c.n_grid.end());
  if (c.diag == "moments") {
    const auto t = moment_diagnostic(spec, grid, c.trials, c.seed, options(c));
    auto os = open_out(dir / "moments.csv");
    write_moment_csv(os, t);
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"m2", est(r.m2)}, {"m4", est(r.m4)}});
    return {{"kind", "moments"}, {"spec", spec.label()}, {"rows", rows}, {"bounded", t.bounded}};
  }
  if (c.diag == "correlation") {
    const auto t = correlation_diagnostic(spec, c.max_lag, c.trials, c.window, c.seed, options(c));
    auto os = open_out(dir / "correlation.csv");
    write_correlation_csv(os, t);
    json rows = json::array();
    for (const auto& r : t.rows)
      rows.push_back({{"lag", r.lag}, {"cov", r.cov}, {"corr", r.corr}, {"stderr", r.std_error}});
    return {{"kind", "correlation"}, {"spec", spec.label()}, {"rows", rows},
            {"decay", fit(t.decay)}, {"significant_lags", t.significant_lags},
            {"iid_consistent", t.iid_consistent}};
  }
  if (c.diag == "bigweight") {
    const auto t = big_weight_diagnostic(spec, grid, c.trials, c.seed, options(c));
    auto os = open_out(dir / "bigweight.csv");
    write_big_weight_csv(os, t);
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"ratio", est(r.ratio)}});
    return {{"kind", "bigweight"}, {"spec", spec.label()}, {"rows", rows},
            {"decreasing", t.decreasing}};
  }
  if (c.diag == "variance") {
    const auto v = variance_summary(spec);
    return {{"kind", "variance"}, {"spec", spec.label()}, {"sigma2", v.sigma2}, {"varU", v.varU},
            {"sigma2_eff", v.sigma2_eff}, {"stderr_sigma2", v.stderr_sigma2},
            {"stderr_sigma2_eff", v.stderr_sigma2_eff}, {"exact", v.exact},
            {"degenerate", v.degenerate}};
  }
  throw ConfigError("diag: kind must be moments, correlation, bigweight or variance");
}

}  // namespace

json to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"spec", c.spec}, {"seed", c.seed}, {"trials", c.trials},
            {"workers", c.workers}, {"out", c.out}, {"cross_check", c.cross_check},
            {"K", c.K}, {"n", c.n}, {"delta", c.delta}, {"exhaustive", c.exhaustive},
            {"log_eps_max", c.log_eps_max}, {"log_eps_min", c.log_eps_min},
            {"eps_points", c.eps_points}, {"log_eps_list", c.log_eps_list},
            {"t_grid", c.t_grid}, {"eta_grid", c.eta_grid}, {"oracle_trials", c.oracle_trials},
            {"sigma2", c.sigma2}, {"method", c.method}, {"dt", c.dt}, {"eta", c.eta}, {"t", c.t},
            {"tail_sigma2", c.tail_sigma2}, {"m_max", c.m_max}, {"tail_trials", c.tail_trials},
            {"sup_x", c.sup_x}, {"bridge_dt", c.bridge_dt}, {"bridge_paths", c.bridge_paths},
            {"diag", c.diag}, {"n_grid", c.n_grid}, {"max_lag", c.max_lag}, {"window", c.window}};
  j["log_eps"] = c.log_eps ? json(*c.log_eps) : json(nullptr);
  j["log_lambda"] = c.log_lambda ? json(*c.log_lambda) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json known = to_json(RunConfig{});
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  RunConfig c;
  get(j, "command", c.command);
  get(j, "spec", c.spec);
  get(j, "seed", c.seed);
  get(j, "trials", c.trials);
  get(j, "workers", c.workers);
  get(j, "out", c.out);
  get(j, "cross_check", c.cross_check);
  get(j, "K", c.K);
  get(j, "n", c.n);
  get(j, "log_eps", c.log_eps);
  get(j, "delta", c.delta);
  get(j, "log_lambda", c.log_lambda);
  get(j, "exhaustive", c.exhaustive);
  get(j, "log_eps_max", c.log_eps_max);
  get(j, "log_eps_min", c.log_eps_min);
  get(j, "eps_points", c.eps_points);
  get(j, "log_eps_list", c.log_eps_list);
  get(j, "t_grid", c.t_grid);
  get(j, "eta_grid", c.eta_grid);
  get(j, "oracle_trials", c.oracle_trials);
  get(j, "sigma2", c.sigma2);
  get(j, "method", c.method);
  get(j, "dt", c.dt);
  get(j, "eta", c.eta);
  get(j, "t", c.t);
  get(j, "tail_sigma2", c.tail_sigma2);
  get(j, "m_max", c.m_max);
  get(j, "tail_trials", c.tail_trials);
  get(j, "sup_x", c.sup_x);
  get(j, "bridge_dt", c.bridge_dt);
  get(j, "bridge_paths", c.bridge_paths);
  get(j, "diag", c.diag);
  get(j, "n_grid", c.n_grid);
  get(j, "max_lag", c.max_lag);
  get(j, "window", c.window);
  return c;
}

void validate(const RunConfig& c) {
  if (!kCommands.count(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  if (c.trials < 1) throw ConfigError("trials must be positive");
  if (c.n < 0) throw ConfigError("n must be non-negative");
  if (!(c.K > 0)) throw ConfigError("K must be positive");
  if (c.log_eps && !(*c.log_eps < 0)) throw ConfigError("log_eps must be negative");
  if (c.command == "bounds-check" && !(c.delta > 0 && c.delta < 1))
    throw ConfigError("delta must lie in (0, 1)");
  if (c.log_lambda && !(*c.log_lambda < 0)) throw ConfigError("log_lambda must be negative");
  if (c.command == "ns" && c.log_eps_list.empty()) {
    if (!(c.log_eps_min < c.log_eps_max && c.log_eps_max < 0))
      throw ConfigError("ns: need log_eps_min < log_eps_max < 0");
    if (c.eps_points < 2) throw ConfigError("ns: eps_points must be at least 2");
  }
  for (double v : c.t_grid) if (!(v > 0 && v <= 1)) throw ConfigError("t_grid entries must lie in (0, 1]");
  for (double v : c.eta_grid) if (!(v > 0)) throw ConfigError("eta_grid entries must be positive");
  for (double v : c.sigma2) if (!(v > 0)) throw ConfigError("sigma2 entries must be positive");
  for (auto v : c.n_grid) if (v < 2) throw ConfigError("n_grid entries must be at least 2");
  if (!(c.dt > 0) || !(c.bridge_dt > 0)) throw ConfigError("time steps must be positive");
  if (!(c.eta > 0) || !(c.t > 0) || !(c.tail_sigma2 > 0)) throw ConfigError("eta, t, tail_sigma2 must be positive");
  if (c.m_max < 3) throw ConfigError("m_max must be at least 3");
  if (c.max_lag < 1 || c.window <= c.max_lag) throw ConfigError("need 1 <= max_lag < window");
}

int run(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  validate(c);
  const fs::path dir = output_dir(c);
  fs::create_directories(dir);

  json manifest = {{"schema", kManifestSchema}, {"tool", "hoplab"}, {"version", kToolVersion},
                   {"config", to_json(c)}, {"seed", c.seed}, {"started_utc", utc_now()},
                   {"results", "results.json"}};
  auto write_manifest = [&](const std::string& outcome) {
    manifest["outcome"] = outcome;
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto os = open_out(dir / "manifest.json");
    os << manifest.dump(2) << "\n";
  };

  int status = kOk;
  json body;
  try {
    if (c.command == "bm-oracle") {
      body = cmd_bm(c, dir);
    } else {
      const auto spec = parse_spec(c.spec, c.seed);
      if (c.command == "spike") body = cmd_spike(c, spec, dir);
      else if (c.command == "local") body = cmd_local(c, spec, dir);
      else if (c.command == "smallest") body = cmd_smallest(c, spec, dir);
      else if (c.command == "ns") body = cmd_ns(c, spec, dir);
      else if (c.command == "bounds-check") body = cmd_bounds(c, spec, dir, status);
      else body = cmd_diag(c, spec, dir);
    }
  } catch (const InvariantViolation& e) {
    log << "invariant violation: " << e.what() << "\n";
    if (!e.weights().empty()) {
      dump_weights(dir / "violation_weights.txt", e.weights(), e.origin());
      log << "offending weights written to " << (dir / "violation_weights.txt").string() << "\n";
    }
    write_manifest("invariant-violation");
    return kInvariantViolation;
  } catch (const SpectralCollision& e) {
    log << e.what() << "\n";
    write_manifest("spectral-collision");
    return kInvariantViolation;
  }

  // results.json carries only what determines the numbers: no workers, no paths, no clock.
  json cfg = to_json(c);
  cfg.erase("workers");
  cfg.erase("out");
  const json results = {{"schema", kResultsSchema}, {"version", kToolVersion},
                        {"command", c.command}, {"config", cfg}, {"results", body}};
  {
    auto os = open_out(dir / "results.json");
    os << results.dump(2) << "\n";
  }
  write_manifest(status == kOk ? "ok" : "invariant-violation");
  log << c.command << ": results in " << dir.string() << "\n";
  if (status != kOk) log << "bounds-check found violations; see " << (dir / "violations").string() << "\n";
  return status;
}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int replay(const std::string& manifest_path, const json& overrides, std::ostream& log) {
  const fs::path mpath(manifest_path);
  json manifest;
  try {
    manifest = json::parse(slurp(mpath));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (manifest.value("schema", "") != kManifestSchema)
    throw ConfigError("manifest: unexpected schema");
  RunConfig c = config_from_json(manifest.at("config"));
  const std::string version = manifest.value("version", "");
  const bool version_match = version == kToolVersion;
  if (!version_match)
    log << "warning: manifest written by version " << version << ", this is " << kToolVersion
        << "; results are not expected to reproduce\n";

  bool seed_overridden = false;
  if (overrides.contains("seed")) {
    const auto s = overrides["seed"].get<std::uint64_t>();
    seed_overridden = s != c.seed;
    c.seed = s;
  }
  if (overrides.contains("workers")) c.workers = overrides["workers"].get<unsigned>();
  const fs::path original = mpath.parent_path() / manifest.value("results", "results.json");
  c.out = overrides.contains("out") ? overrides["out"].get<std::string>()
                                    : (mpath.parent_path() / "replay").string();
  if (fs::exists(c.out) && fs::equivalent(c.out, fs::absolute(mpath).parent_path()))
    throw ConfigError("replay: output directory must differ from the original run");

  const int status = run(c, log);
  if (status != kOk && !fs::exists(fs::path(c.out) / "results.json")) return status;

  const bool identical = slurp(original) == slurp(fs::path(c.out) / "results.json");
  const json report = {{"original", original.string()}, {"identical", identical},
                       {"version_match", version_match}, {"reproducible", version_match},
                       {"seed_overridden", seed_overridden}, {"workers", c.workers}};
  {
    auto os = open_out(fs::path(c.out) / "replay.json");
    os << report.dump(2) << "\n";
  }
  if (identical) {
    log << "replay: results.json identical\n";
    return status;
  }
  if (seed_overridden) {
    log << "replay: results differ (seed overridden)\n";
    return status;
  }
  if (!version_match) {
    log << "replay: results differ (version mismatch, not reproducible)\n";
    return status;
  }
  log << "replay: results.json differs from the original run\n";
  return kInvariantViolation;
}

int main(int argc, char** argv) {
  CLI::App app{"hoplab: spectra of random hopping operators near zero"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  json cli;  // only flags actually given on the command line
  std::string config_path;
  std::string manifest_path;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "JSON config file; flags override it");
    s->add_option_function<std::string>("--spec", [&](const std::string& v) { cli["spec"] = v; },
                                        "weight process, e.g. two-point:0.9, dyson-gamma:1, sol");
    s->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { cli["seed"] = v; });
    s->add_option_function<std::int64_t>("--trials", [&](std::int64_t v) { cli["trials"] = v; });
    s->add_option_function<unsigned>("--workers", [&](unsigned v) { cli["workers"] = v; },
                                     "worker threads (0: all cores)");
    s->add_option_function<std::string>("--out", [&](const std::string& v) { cli["out"] = v; });
    s->add_flag_function("--cross-check", [&](std::int64_t k) { cli["cross_check"] = k > 0; },
                         "verify every count with the transfer recursion");
    s->add_option_function<double>("-K,--K", [&](double v) { cli["K"] = v; });
    s->add_option_function<std::int64_t>("-n,--n", [&](std::int64_t v) { cli["n"] = v; });
  };
  auto vec = [&](CLI::App* s, const char* flag, const char* key) {
    s->add_option_function<std::vector<double>>(flag, [&cli, key](const std::vector<double>& v) {
       cli[key] = v;
     })->delimiter(',');
  };

  auto* spike = app.add_subcommand("spike", "spike estimate at (K, n)");
  common(spike);
  spike->add_option_function<double>("--log-eps", [&](double v) { cli["log_eps"] = v; },
                                     "choose n from log eps and K");

  auto* local = app.add_subcommand("local", "local eigenvalue statistics against the oracle");
  common(local);
  vec(local, "--t-grid", "t_grid");
  vec(local, "--eta-grid", "eta_grid");
  local->add_option_function<std::int64_t>("--oracle-trials",
                                           [&](std::int64_t v) { cli["oracle_trials"] = v; });

  auto* smallest = app.add_subcommand("smallest", "law of the smallest positive eigenvalue");
  common(smallest);

  auto* ns = app.add_subcommand("ns", "density of states exponent near zero");
  common(ns);
  ns->add_option_function<double>("--log-eps-max", [&](double v) { cli["log_eps_max"] = v; });
  ns->add_option_function<double>("--log-eps-min", [&](double v) { cli["log_eps_min"] = v; });
  ns->add_option_function<int>("--eps-points", [&](int v) { cli["eps_points"] = v; });
  vec(ns, "--log-eps", "log_eps_list");

  auto* bounds = app.add_subcommand("bounds-check", "check the crossing sandwich bounds");
  common(bounds);
  bounds->add_option_function<double>("--delta", [&](double v) { cli["delta"] = v; });
  bounds->add_option_function<double>("--log-lambda", [&](double v) { cli["log_lambda"] = v; });
  bounds->add_flag_function("--exhaustive", [&](std::int64_t k) { cli["exhaustive"] = k > 0; },
                            "enumerate all two-point patterns");

  auto* bm = app.add_subcommand("bm-oracle", "Brownian oracle: renewal rate, tails, sup law");
  common(bm);
  vec(bm, "--sigma2", "sigma2");
  bm->add_option_function<std::string>("--method", [&](const std::string& v) { cli["method"] = v; });
  bm->add_option_function<double>("--dt", [&](double v) { cli["dt"] = v; });
  bm->add_option_function<double>("--eta", [&](double v) { cli["eta"] = v; });
  bm->add_option_function<double>("--t", [&](double v) { cli["t"] = v; });
  bm->add_option_function<double>("--tail-sigma2", [&](double v) { cli["tail_sigma2"] = v; });
  bm->add_option_function<int>("--m-max", [&](int v) { cli["m_max"] = v; });
  bm->add_option_function<std::int64_t>("--tail-trials", [&](std::int64_t v) { cli["tail_trials"] = v; });
  bm->add_option_function<double>("--sup-x", [&](double v) { cli["sup_x"] = v; });
  bm->add_option_function<double>("--bridge-dt", [&](double v) { cli["bridge_dt"] = v; });
  bm->add_option_function<std::int64_t>("--bridge-paths", [&](std::int64_t v) { cli["bridge_paths"] = v; });

  auto* diag = app.add_subcommand("diag", "weight-process diagnostics");
  common(diag);
  diag->add_option_function<std::string>("--kind", [&](const std::string& v) { cli["diag"] = v; },
                                         "moments, correlation, bigweight or variance");
  diag->add_option_function<std::vector<std::int64_t>>(
          "--n-grid", [&](const std::vector<std::int64_t>& v) { cli["n_grid"] = v; })
      ->delimiter(',');
  diag->add_option_function<int>("--max-lag", [&](int v) { cli["max_lag"] = v; });
  diag->add_option_function<std::int64_t>("--window", [&](std::int64_t v) { cli["window"] = v; });

  auto* rep = app.add_subcommand("replay", "re-run a manifest and compare results");
  rep->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  rep->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { cli["seed"] = v; });
  rep->add_option_function<unsigned>("--workers", [&](unsigned v) { cli["workers"] = v; });
  rep->add_option_function<std::string>("--out", [&](const std::string& v) { cli["out"] = v; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (rep->parsed()) return replay(manifest_path, cli, std::cerr);

    json merged = json::object();
    if (!config_path.empty()) {
      try {
        merged = json::parse(slurp(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      if (!merged.is_object()) throw ConfigError(config_path + ": expected a JSON object");
    }
    for (const auto& [k, v] : cli.items()) merged[k] = v;
    merged["command"] = app.get_subcommands().front()->get_name();
    return run(config_from_json(merged), std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace hop::cli
