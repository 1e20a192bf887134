#ifndef HOP_ESTIMATORS_HPP
#define HOP_ESTIMATORS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hop/stats.hpp"
#include "hop/weights.hpp"

namespace hop {

struct RunOptions {
  unsigned workers = 1;
  bool cross_check = false;  // also run the transfer count and demand agreement
};

/// Largest odd n <= K^2 |log eps|^2.
Eigen::Index spike_n_for(double K, double log_eps);

struct SpikeEstimate {
  std::string spec;
  double K = 0;
  Eigen::Index n = 0;
  double log_eps = 0;  // eps = exp(-sqrt(n)/K)
  std::int64_t trials = 0;
  Estimate mu;    // mu_n(-eps, eps) = E[2 M+] / (n+1)
  Estimate vhat;  // mu * |log eps|^2
  double sigma2_ref = 0;
  std::int64_t nudges = 0;
  bool cross_checked = false;
  std::vector<std::int64_t> counts;  // 2 M+ per trial
};

/// Spike estimate at (K, n). An even n is reduced by one; eps follows from
/// |log eps| = sqrt(n)/K. Throws ConfigError for degenerate specs and
/// InvariantViolation when a cross-checked trial disagrees.
SpikeEstimate spike_estimate(const WeightProcessSpec& spec, double K, Eigen::Index n,
                             std::int64_t trials, std::uint64_t seed, const RunOptions& opt = {});

struct LocalCell {
  double t = 1, eta = 1;
  Eigen::Index m = 0;  // odd operator size used for this t
  IntLaw empirical;
  IntLaw oracle;
  double tv = 0;
};

struct LocalStatsReport {
  std::string spec;
  Eigen::Index n = 0;
  std::int64_t trials = 0;
  std::int64_t oracle_trials = 0;
  double sigma2 = 0;  // variance used by the oracle
  std::vector<LocalCell> cells;
  std::int64_t monotone_violations = 0;  // trials where Lambda_n grows with eta
  double max_tv() const;
};

/// Lambda_n(t, eta) = #eigenvalues of H_m in (0, exp(-eta sqrt(n))), m the
/// odd integer nearest floor(t n) (ties and m > n resolved downward),
/// against the exact renewal sampler of Lambda(t, eta) at sigma2_eff.
LocalStatsReport local_stats(const WeightProcessSpec& spec, Eigen::Index n,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& eta_grid, std::int64_t trials,
                             std::uint64_t seed, const RunOptions& opt = {},
                             std::int64_t oracle_trials = 0);

struct SmallestEigReport {
  std::string spec;
  Eigen::Index n = 0;
  double sigma = 0;
  std::vector<double> samples;  // -log(lambda_0) / sqrt(n)
  double ks = 0;
  double median = 0;
  std::int64_t bracket_enlarged = 0;
};

/// -log lambda_0 / sqrt(n) by bisection in log lambda over [-4 sigma sqrt(n), 0],
/// to 1e-3 relative precision, compared with sigma sup|B| by KS distance.
SmallestEigReport smallest_eig_law(const WeightProcessSpec& spec, Eigen::Index n,
                                   std::int64_t trials, std::uint64_t seed,
                                   const RunOptions& opt = {});

/// Smallest positive eigenvalue in log coordinates for one operator.
double smallest_log_eig(const WeightSequence& w, double lo, double hi, bool* enlarged = nullptr);

struct NSPoint {
  double log_eps = 0;
  Eigen::Index n = 0;
  Estimate mu;
};

struct NSEstimate {
  std::string spec;
  double K = 0;
  std::vector<NSPoint> points;
  LinearFit power;  // log mu vs log eps; slope = alpha-hat
  LinearFit spike;  // log mu vs log|log eps|; target slope -2
  std::vector<double> local_alpha;  // slopes between neighbouring grid points
  std::int64_t zero_points = 0;     // grid points with mu-hat = 0, excluded from fits
};

NSEstimate novikov_shubin(const WeightProcessSpec& spec, const std::vector<double>& log_eps_grid,
                          double K, std::int64_t trials, std::uint64_t seed,
                          const RunOptions& opt = {});

/// Geometric grid of count points from eps_max down to eps_min, as logs.
std::vector<double> log_eps_grid(double log_eps_max, double log_eps_min, int count);

struct MomentRow {
  Eigen::Index n = 0;  // number of increments summed
  Estimate m2;         // E S_n^2 / n
  Estimate m4;         // E S_n^4 / n^2
};

struct MomentTable {
  std::vector<MomentRow> rows;
  bool bounded = false;  // last ratio <= 2 x median ratio, for both moments
};

MomentTable moment_diagnostic(const WeightProcessSpec& spec, const std::vector<Eigen::Index>& n_grid,
                              std::int64_t trials, std::uint64_t seed, const RunOptions& opt = {});

struct CorrelationRow {
  int lag = 0;
  double cov = 0;   // E U_0 U_l - (E U)^2
  double corr = 0;  // cov / Var U
  double std_error = 0;  // of corr
};

struct CorrelationTable {
  std::vector<CorrelationRow> rows;  // lag 0..max_lag
  LinearFit decay;                   // log|corr| vs lag over significant lags >= 1
  int significant_lags = 0;
  bool iid_consistent = false;       // every lag >= 1 within 4 standard errors of 0
};

CorrelationTable correlation_diagnostic(const WeightProcessSpec& spec, int max_lag,
                                        std::int64_t trials, Eigen::Index window,
                                        std::uint64_t seed, const RunOptions& opt = {});

struct BigWeightRow {
  Eigen::Index n = 0;
  Estimate ratio;  // E max_k |log|a_k|| / sqrt(n)
};

struct BigWeightTable {
  std::vector<BigWeightRow> rows;
  bool decreasing = false;
};

BigWeightTable big_weight_diagnostic(const WeightProcessSpec& spec,
                                     const std::vector<Eigen::Index>& n_grid, std::int64_t trials,
                                     std::uint64_t seed, const RunOptions& opt = {});

/// log|a| standard Cauchy: infinite variance, used as a contrast case.
WeightProcessSpec heavy_tail_control(std::uint64_t seed = 0);

void write_spike_csv(std::ostream& os, const SpikeEstimate& e);
void write_local_csv(std::ostream& os, const LocalStatsReport& r);
void write_smallest_csv(std::ostream& os, const SmallestEigReport& r);
void write_ns_csv(std::ostream& os, const NSEstimate& e);
void write_moment_csv(std::ostream& os, const MomentTable& t);
void write_correlation_csv(std::ostream& os, const CorrelationTable& t);
void write_big_weight_csv(std::ostream& os, const BigWeightTable& t);

}  // namespace hop

#endif  // HOP_ESTIMATORS_HPP
