#include "hop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "hop/brownian.hpp"
#include "hop/errors.hpp"
#include "hop/operator.hpp"
#include "hop/parallel.hpp"
#include "hop/transfer.hpp"

namespace hop {

namespace {

void require_nondegenerate(const WeightProcessSpec& spec, const VarianceSummary& v) {
  if (v.degenerate)
    throw ConfigError("spec " + spec.label() + " has Var log|a| = 0; the spike needs sigma^2 > 0");
}

FiniteOperator head_operator(const WeightSequence& w, Eigen::Index m) {
  FiniteOperator op;
  op.a = w.values.head(m);
  op.loga = w.logs.head(m);
  op.provenance = w.provenance;
  return op;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

Eigen::Index spike_n_for(double K, double log_eps) {
  const double x = K * K * log_eps * log_eps;
  auto n = static_cast<Eigen::Index>(std::floor(x * (1 + 1e-14)));
  if (n % 2 == 0) --n;
  return std::max<Eigen::Index>(n, 1);
}

SpikeEstimate spike_estimate(const WeightProcessSpec& spec, double K, Eigen::Index n,
                             std::int64_t trials, std::uint64_t seed, const RunOptions& opt) {
  spec.validate();
  if (!(K >= 2)) throw ConfigError("spike_estimate: K must be >= 2");
  if (n < 1) throw ConfigError("spike_estimate: n must be >= 1");
  if (trials < 1) throw ConfigError("spike_estimate: trials must be >= 1");
  const VarianceSummary var = variance_summary(spec);
  require_nondegenerate(spec, var);

  SpikeEstimate e;
  e.spec = spec.label();
  e.K = K;
  e.n = n % 2 ? n : n - 1;
  e.log_eps = -std::sqrt(static_cast<double>(e.n)) / K;
  e.trials = trials;
  e.sigma2_ref = var.sigma2_eff;
  e.cross_checked = opt.cross_check;

  WeightProcessSpec s = spec;
  s.seed = stream_seed(mix_seed(spec.seed, seed), "spike");
  const SignedLog eps = SignedLog::from_log(e.log_eps);
  struct Trial {
    std::int64_t count = 0;
    int nudges = 0;
  };
  auto res = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
    WeightSequence w = sample(s, e.n, t);
    WindowCount c = count_in_window(FiniteOperator(w), eps);
    if (opt.cross_check) {
      JumpCount j = jump_count(w, eps);
      if ((j.jumps + 1) / 2 != c.positive)
        throw InvariantViolation("spike trial " + std::to_string(t) + ": transfer count " +
                                 std::to_string((j.jumps + 1) / 2) + " != Sturm count " +
                                 std::to_string(c.positive),
                                 std::vector<double>(w.values.begin(), w.values.end()),
                                 w.provenance.spec + " seed " + std::to_string(w.provenance.seed) +
                                     " trial " + std::to_string(t));
    }
    return Trial{c.window, c.nudges};
  });
  std::vector<double> mu(res.size()), v(res.size());
  const double L2 = e.log_eps * e.log_eps;
  for (std::size_t i = 0; i < res.size(); ++i) {
    e.counts.push_back(res[i].count);
    e.nudges += res[i].nudges;
    mu[i] = static_cast<double>(res[i].count) / static_cast<double>(e.n + 1);
    v[i] = mu[i] * L2;
  }
  e.mu = mean_stderr(mu);
  e.vhat = mean_stderr(v);
  return e;
}

double LocalStatsReport::max_tv() const {
  double m = 0;
  for (const auto& c : cells) m = std::max(m, c.tv);
  return m;
}

LocalStatsReport local_stats(const WeightProcessSpec& spec, Eigen::Index n,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& eta_grid, std::int64_t trials,
                             std::uint64_t seed, const RunOptions& opt,
                             std::int64_t oracle_trials) {
  spec.validate();
  if (t_grid.empty() || eta_grid.empty()) throw ConfigError("local_stats: empty grid");
  for (double t : t_grid)
    if (!(t > 0)) throw ConfigError("local_stats: t must be positive");
  for (double eta : eta_grid)
    if (!(eta > 0)) throw ConfigError("local_stats: eta must be positive");
  const VarianceSummary var = variance_summary(spec);
  require_nondegenerate(spec, var);

  LocalStatsReport r;
  r.spec = spec.label();
  r.n = n;
  r.trials = trials;
  r.oracle_trials = oracle_trials > 0 ? oracle_trials : trials;
  r.sigma2 = var.sigma2_eff;

  std::vector<double> etas = eta_grid;
  std::sort(etas.begin(), etas.end());
  std::vector<Eigen::Index> ms;
  Eigen::Index m_max = 1;
  for (double t : t_grid) {
    auto m = static_cast<Eigen::Index>(std::floor(t * static_cast<double>(n)));
    if (m % 2 == 0) m = std::max<Eigen::Index>(1, m - 1);
    ms.push_back(m);
    m_max = std::max(m_max, m);
  }

  WeightProcessSpec s = spec;
  s.seed = stream_seed(mix_seed(spec.seed, seed), "local");
  const double rn = std::sqrt(static_cast<double>(n));
  struct Trial {
    std::vector<std::int64_t> counts;  // [t][eta]
    bool monotone = true;
  };
  auto res = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t tr) {
    WeightSequence w = sample(s, m_max, tr);
    Trial out;
    for (Eigen::Index m : ms) {
      FiniteOperator op = head_operator(w, m);
      std::int64_t prev = -1;
      for (double eta : etas) {
        const auto c = count_in_window(op, SignedLog::from_log(-eta * rn)).positive;
        if (prev >= 0 && c > prev) out.monotone = false;
        prev = c;
        out.counts.push_back(c);
      }
    }
    return out;
  });

  const std::uint64_t os = stream_seed(seed, "local-oracle");
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    for (std::size_t ei = 0; ei < etas.size(); ++ei) {
      LocalCell cell;
      cell.t = t_grid[ti];
      cell.eta = etas[ei];
      cell.m = ms[ti];
      std::vector<std::int64_t> emp;
      for (const auto& tr : res) emp.push_back(tr.counts[ti * etas.size() + ei]);
      cell.empirical = int_law(emp);
      const std::uint64_t cs = mix_seed(os, ti * 1000003ULL + ei);
      auto orc = map_trials(static_cast<std::uint64_t>(r.oracle_trials), opt.workers,
                            [&](std::uint64_t i) {
                              Rng rng = trial_rng(cs, i);
                              return sample_well_count(r.sigma2, cell.t, cell.eta, rng).wells;
                            });
      cell.oracle = int_law(orc);
      cell.tv = tv_distance(cell.empirical, cell.oracle);
      r.cells.push_back(std::move(cell));
    }
  }
  for (const auto& tr : res) r.monotone_violations += !tr.monotone;
  return r;
}

double smallest_log_eig(const WeightSequence& w, double lo, double hi, bool* enlarged) {
  const FiniteOperator op(w);
  auto has = [&](double L) { return count_in_window(op, SignedLog::from_log(L)).positive >= 1; };
  bool grew = false;
  if (!has(hi)) {
    hi = std::log(2 * w.values.abs().maxCoeff() + 1) + 1;
    grew = true;
  }
  if (has(lo)) {
    lo = 2 * lo - 1;
    grew = true;
  }
  if (enlarged) *enlarged = grew;
  if (!has(hi) || has(lo))
    throw InvariantViolation("smallest eigenvalue outside the enlarged bisection bracket");
  while (hi - lo > 1e-3 * std::max(std::abs(0.5 * (lo + hi)), 1e-6)) {
    const double mid = 0.5 * (lo + hi);
    if (has(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

SmallestEigReport smallest_eig_law(const WeightProcessSpec& spec, Eigen::Index n,
                                   std::int64_t trials, std::uint64_t seed,
                                   const RunOptions& opt) {
  spec.validate();
  if (n % 2 == 0) throw ConfigError("smallest_eig_law: n must be odd");
  const VarianceSummary var = variance_summary(spec);
  SmallestEigReport r;
  r.spec = spec.label();
  r.n = n;
  r.sigma = std::sqrt(var.sigma2_eff);
  const double rn = std::sqrt(static_cast<double>(n));
  const double lo = -4 * std::max(r.sigma, 0.25) * rn;

  WeightProcessSpec s = spec;
  s.seed = stream_seed(mix_seed(spec.seed, seed), "smallest");
  struct Trial {
    double x = 0;
    bool enlarged = false;
  };
  auto res = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
    WeightSequence w = sample(s, n, t);
    Trial out;
    out.x = -smallest_log_eig(w, lo, 0.0, &out.enlarged) / rn;
    return out;
  });
  for (const auto& t : res) {
    r.samples.push_back(t.x);
    r.bracket_enlarged += t.enlarged;
  }
  r.median = median_of(r.samples);
  if (r.sigma > 0) {
    const double sg = r.sigma;
    r.ks = ks_one_sample(r.samples, [sg](double x) { return sup_abs_cdf(x / sg); });
  } else {
    r.ks = 1;
  }
  return r;
}

std::vector<double> log_eps_grid(double log_eps_max, double log_eps_min, int count) {
  if (count < 2) throw ConfigError("epsilon grid needs at least two points");
  std::vector<double> g;
  for (int i = 0; i < count; ++i)
    g.push_back(log_eps_max + (log_eps_min - log_eps_max) * i / (count - 1.0));
  return g;
}

NSEstimate novikov_shubin(const WeightProcessSpec& spec, const std::vector<double>& grid,
                          double K, std::int64_t trials, std::uint64_t seed,
                          const RunOptions& opt) {
  spec.validate();
  if (grid.size() < 5) throw ConfigError("novikov_shubin: the epsilon grid needs >= 5 points");
  for (double l : grid)
    if (!(l < 0)) throw ConfigError("novikov_shubin: epsilon must lie in (0,1)");
  NSEstimate e;
  e.spec = spec.label();
  e.K = K;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    NSPoint p;
    p.log_eps = grid[i];
    p.n = spike_n_for(K, grid[i]);
    WeightProcessSpec s = spec;
    s.seed = mix_seed(stream_seed(mix_seed(spec.seed, seed), "ns"), i);
    const SignedLog eps = SignedLog::from_log(grid[i]);
    auto mu = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
      WeightSequence w = sample(s, p.n, t);
      return static_cast<double>(count_in_window(FiniteOperator(w), eps).window) /
             static_cast<double>(p.n + 1);
    });
    p.mu = mean_stderr(mu);
    e.points.push_back(p);
  }
  std::vector<double> lx, ly, lly;
  for (const auto& p : e.points) {
    if (p.mu.mean <= 0) {
      ++e.zero_points;
      continue;
    }
    lx.push_back(p.log_eps);
    lly.push_back(std::log(-p.log_eps));
    ly.push_back(std::log(p.mu.mean));
  }
  if (lx.size() >= 2) {
    auto map = [](const std::vector<double>& v) {
      return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    e.power = linear_fit(map(lx), map(ly));
    e.spike = linear_fit(map(lly), map(ly));
    for (std::size_t i = 1; i < lx.size(); ++i)
      e.local_alpha.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
  }
  return e;
}

MomentTable moment_diagnostic(const WeightProcessSpec& spec, const std::vector<Eigen::Index>& n_grid,
                              std::int64_t trials, std::uint64_t seed, const RunOptions& opt) {
  spec.validate();
  MomentTable tab;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const Eigen::Index n = n_grid[i];
    if (n < 1) throw ConfigError("moment_diagnostic: n must be >= 1");
    WeightProcessSpec s = spec;
    s.seed = mix_seed(stream_seed(mix_seed(spec.seed, seed), "moments"), i);
    auto sn = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
      return log_ratio_walk(sample(s, 2 * n, t)).S[n];
    });
    std::vector<double> r2, r4;
    const double nd = static_cast<double>(n);
    for (double v : sn) {
      r2.push_back(v * v / nd);
      r4.push_back(v * v * v * v / (nd * nd));
    }
    tab.rows.push_back({n, mean_stderr(r2), mean_stderr(r4)});
  }
  std::vector<double> m2, m4;
  for (const auto& r : tab.rows) {
    m2.push_back(r.m2.mean);
    m4.push_back(r.m4.mean);
  }
  tab.bounded = !tab.rows.empty() && m2.back() <= 2 * median_of(m2) &&
                m4.back() <= 2 * median_of(m4);
  return tab;
}

CorrelationTable correlation_diagnostic(const WeightProcessSpec& spec, int max_lag,
                                        std::int64_t trials, Eigen::Index window,
                                        std::uint64_t seed, const RunOptions& opt) {
  spec.validate();
  if (max_lag < 1 || window < 1) throw ConfigError("correlation_diagnostic: bad lag or window");
  WeightProcessSpec s = spec;
  s.seed = stream_seed(mix_seed(spec.seed, seed), "corr");
  const Eigen::Index len = window + max_lag;
  // Per trial: mean of U and mean of U_j U_{j+l} over j < window.
  auto res = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
    const Walk w = log_ratio_walk(sample(s, 2 * len, t));
    Eigen::ArrayXd out(max_lag + 2);
    out[0] = w.U.head(window).mean();
    for (int l = 0; l <= max_lag; ++l)
      out[l + 1] = (w.U.head(window) * w.U.segment(l, window)).mean();
    return out;
  });
  CorrelationTable tab;
  std::vector<double> mean_u;
  for (const auto& r : res) mean_u.push_back(r[0]);
  const double mu = mean_stderr(mean_u).mean;
  double var0 = 0;
  for (int l = 0; l <= max_lag; ++l) {
    std::vector<double> prod;
    for (const auto& r : res) prod.push_back(r[l + 1] - mu * mu);
    const Estimate c = mean_stderr(prod);
    if (l == 0) var0 = c.mean;
    CorrelationRow row;
    row.lag = l;
    row.cov = c.mean;
    row.corr = var0 > 0 ? c.mean / var0 : 0;
    row.std_error = var0 > 0 ? c.std_error / var0 : 0;
    tab.rows.push_back(row);
  }
  tab.iid_consistent = true;
  std::vector<double> lags, logc;
  for (const auto& row : tab.rows) {
    if (row.lag == 0) continue;
    if (std::abs(row.corr) > 4 * row.std_error) tab.iid_consistent = false;
    if (std::abs(row.corr) > 3 * row.std_error && lags.size() + 1 == static_cast<std::size_t>(row.lag)) {
      lags.push_back(row.lag);
      logc.push_back(std::log(std::abs(row.corr)));
    }
  }
  tab.significant_lags = static_cast<int>(lags.size());
  if (lags.size() >= 2)
    tab.decay = linear_fit(Eigen::Map<const Eigen::ArrayXd>(lags.data(), lags.size()),
                           Eigen::Map<const Eigen::ArrayXd>(logc.data(), logc.size()));
  return tab;
}

BigWeightTable big_weight_diagnostic(const WeightProcessSpec& spec,
                                     const std::vector<Eigen::Index>& n_grid, std::int64_t trials,
                                     std::uint64_t seed, const RunOptions& opt) {
  spec.validate();
  BigWeightTable tab;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const Eigen::Index n = n_grid[i];
    WeightProcessSpec s = spec;
    s.seed = mix_seed(stream_seed(mix_seed(spec.seed, seed), "bigweight"), i);
    auto r = map_trials(static_cast<std::uint64_t>(trials), opt.workers, [&](std::uint64_t t) {
      return sample(s, n, t).logs.abs().maxCoeff() / std::sqrt(static_cast<double>(n));
    });
    tab.rows.push_back({n, mean_stderr(r)});
  }
  tab.decreasing = tab.rows.size() >= 2;
  for (std::size_t i = 1; i < tab.rows.size(); ++i) {
    const auto& a = tab.rows[i - 1].ratio;
    const auto& b = tab.rows[i].ratio;
    if (b.mean > a.mean + 2 * std::hypot(a.std_error, b.std_error)) tab.decreasing = false;
  }
  if (tab.rows.size() >= 2 && !(tab.rows.back().ratio.mean < tab.rows.front().ratio.mean))
    tab.decreasing = false;
  return tab;
}

WeightProcessSpec heavy_tail_control(std::uint64_t seed) {
  return WeightProcessSpec::from_sampler(
      [](Rng& rng) {
        std::cauchy_distribution<double> c(0.0, 1.0);
        double x = c(rng);
        // keep exp(x) finite and nonzero
        x = std::clamp(x, -700.0, 700.0);
        return std::exp(x);
      },
      "log-cauchy", seed);
}

namespace {

struct PrecisionGuard {
  std::ostream& os;
  std::streamsize old;
  explicit PrecisionGuard(std::ostream& o) : os(o), old(o.precision(17)) {}
  ~PrecisionGuard() { os.precision(old); }
};

}  // namespace

void write_spike_csv(std::ostream& os, const SpikeEstimate& e) {
  PrecisionGuard g(os);
  os << "trial,window_count,mu,vhat\n";
  const double L2 = e.log_eps * e.log_eps;
  for (std::size_t i = 0; i < e.counts.size(); ++i) {
    const double mu = static_cast<double>(e.counts[i]) / static_cast<double>(e.n + 1);
    os << i << ',' << e.counts[i] << ',' << mu << ',' << mu * L2 << '\n';
  }
}

void write_local_csv(std::ostream& os, const LocalStatsReport& r) {
  PrecisionGuard g(os);
  os << "t,eta,m,k,p_empirical,p_oracle,tv\n";
  for (const auto& c : r.cells) {
    std::int64_t kmax = 0;
    if (!c.empirical.empty()) kmax = std::max(kmax, c.empirical.rbegin()->first);
    if (!c.oracle.empty()) kmax = std::max(kmax, c.oracle.rbegin()->first);
    for (std::int64_t k = 0; k <= kmax; ++k) {
      auto pe = c.empirical.count(k) ? c.empirical.at(k) : 0.0;
      auto po = c.oracle.count(k) ? c.oracle.at(k) : 0.0;
      os << c.t << ',' << c.eta << ',' << c.m << ',' << k << ',' << pe << ',' << po << ','
         << c.tv << '\n';
    }
  }
}

void write_smallest_csv(std::ostream& os, const SmallestEigReport& r) {
  PrecisionGuard g(os);
  os << "trial,x,oracle_cdf\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    os << i << ',' << r.samples[i] << ','
       << (r.sigma > 0 ? sup_abs_cdf(r.samples[i] / r.sigma) : 0.0) << '\n';
}

void write_ns_csv(std::ostream& os, const NSEstimate& e) {
  PrecisionGuard g(os);
  os << "log_eps,n,mu,stderr,trials\n";
  for (const auto& p : e.points)
    os << p.log_eps << ',' << p.n << ',' << p.mu.mean << ',' << p.mu.std_error << ','
       << p.mu.trials << '\n';
}

void write_moment_csv(std::ostream& os, const MomentTable& t) {
  PrecisionGuard g(os);
  os << "n,m2,m2_stderr,m4,m4_stderr\n";
  for (const auto& r : t.rows)
    os << r.n << ',' << r.m2.mean << ',' << r.m2.std_error << ',' << r.m4.mean << ','
       << r.m4.std_error << '\n';
}

void write_correlation_csv(std::ostream& os, const CorrelationTable& t) {
  PrecisionGuard g(os);
  os << "lag,cov,corr,stderr\n";
  for (const auto& r : t.rows)
    os << r.lag << ',' << r.cov << ',' << r.corr << ',' << r.std_error << '\n';
}

void write_big_weight_csv(std::ostream& os, const BigWeightTable& t) {
  PrecisionGuard g(os);
  os << "n,ratio,stderr\n";
  for (const auto& r : t.rows) os << r.n << ',' << r.ratio.mean << ',' << r.ratio.std_error << '\n';
}

}  // namespace hop
