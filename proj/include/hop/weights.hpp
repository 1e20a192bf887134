#ifndef HOP_WEIGHTS_HPP
#define HOP_WEIGHTS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hop/rng.hpp"

namespace hop {

enum class WeightKind {
  TwoPoint,       // a in {1, 2p-1}, each w.p. 1/2
  DysonGamma,     // a = sqrt(lambda), lambda ~ Gamma(m, rate m)
  LogNormal,      // log|a| ~ N(0, s^2)
  EmpiricalFile,  // i.i.d. resampling of values read from a file
  Toral,          // a_k = f(B^k x), Haar-random x
  Constant,       // a = c
  Sampler,        // i.i.d. draws from a user callback
};

std::string_view kind_name(WeightKind k);

using WeightSampler = std::function<double(Rng&)>;

struct WeightProcessSpec {
  WeightKind kind = WeightKind::Constant;

  double p = 0.9;           // two-point
  int order = 1;            // dyson-gamma
  double sigma_logw = 1.0;  // lognormal
  double value = 1.0;       // constant
  std::string path;         // empirical-file
  std::vector<double> empirical;
  std::array<std::int64_t, 4> matrix{2, 1, 1, 1};  // toral, row-major
  double shift = 5.0;                              // toral
  WeightSampler sampler;                           // sampler
  std::string sampler_name;

  std::uint64_t seed = 0;

  /// Throws ConfigError if the process can produce a zero weight or the
  /// parameters are out of range.
  void validate() const;

  /// Canonical text form, parseable by parse_spec (except Sampler).
  std::string label() const;

  bool iid() const { return kind != WeightKind::Toral; }

  static WeightProcessSpec two_point(double p, std::uint64_t seed = 0);
  static WeightProcessSpec dyson_gamma(int m, std::uint64_t seed = 0);
  static WeightProcessSpec lognormal(double s, std::uint64_t seed = 0);
  static WeightProcessSpec constant(double c, std::uint64_t seed = 0);
  static WeightProcessSpec toral(std::array<std::int64_t, 4> b = {2, 1, 1, 1},
                                 double shift = 5.0, std::uint64_t seed = 0);
  static WeightProcessSpec from_sampler(WeightSampler f, std::string name,
                                        std::uint64_t seed = 0);
  static WeightProcessSpec empirical_file(const std::string& path,
                                          std::uint64_t seed = 0);
};

/// Parses "two-point:0.9", "dyson-gamma:1", "lognormal:0.5", "constant:1",
/// "empirical-file:PATH", "toral:2,1,1,1:5", "sol" (= toral defaults) and
/// "lamplighter:p" (= two-point). Throws ConfigError with a diagnostic.
WeightProcessSpec parse_spec(std::string_view text, std::uint64_t seed = 0);

/// One text value per line, '#' starts a comment. Zero entries are rejected.
std::vector<double> load_empirical_weights(const std::string& path);

struct Provenance {
  std::string spec;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

struct WeightSequence {
  Eigen::ArrayXd values;
  Eigen::ArrayXd logs;  // log|values|, computed once
  Provenance provenance;

  Eigen::Index size() const { return values.size(); }

  /// Builds a sequence from raw values; throws ConfigError on zero or
  /// non-finite entries.
  static WeightSequence from_values(const Eigen::ArrayXd& v, Provenance prov = {});
  static WeightSequence from_values(std::initializer_list<double> v);
};

WeightSequence sample(const WeightProcessSpec& spec, Eigen::Index n, std::uint64_t trial);

struct Walk {
  Eigen::ArrayXd U;  // U_i = 2 log|a_{2i-1}/a_{2i}|, i = 1..k
  Eigen::ArrayXd S;  // S_0 = 0, S_i = S_{i-1} + U_i; size k+1
  Eigen::Index n = 0;

  Eigen::Index steps() const { return U.size(); }
};

/// Pairs consecutive weights; a trailing odd weight is ignored.
Walk log_ratio_walk(const WeightSequence& w);

struct VarianceSummary {
  double sigma2 = 0;  // Var log|a|
  double varU = 0;    // Var U_1
  /// Long-run variance of the walk divided by 8, i.e. lim Var S_k / (8k).
  /// Equals sigma2 for i.i.d. kinds.
  double sigma2_eff = 0;
  double stderr_sigma2 = 0;
  double stderr_sigma2_eff = 0;
  bool exact = true;
  bool degenerate = false;
};

VarianceSummary variance_summary(const WeightProcessSpec& spec);

}  // namespace hop

#endif  // HOP_WEIGHTS_HPP
