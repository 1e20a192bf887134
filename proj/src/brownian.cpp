#include "hop/brownian.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "hop/crossings.hpp"
#include "hop/errors.hpp"
#include "hop/parallel.hpp"

namespace hop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesTol = 1e-17;

double normal_sf(double y) { return 0.5 * std::erfc(y / std::numbers::sqrt2); }
double normal_pdf(double y) { return std::exp(-0.5 * y * y) / std::sqrt(2 * kPi); }

double theta_c(int k) {
  const double o = 2.0 * k + 1;
  return o * o * kPi * kPi / 8;
}

// sum_k (-1)^k/(2k+1) exp(-(c_k - c_0)/x^2), so F = (4/pi) e^{-c_0/x^2} * this.
double theta_reduced(double x) {
  const double c0 = theta_c(0);
  double s = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-(theta_c(k) - c0) / (x * x)) / (2.0 * k + 1);
    s += (k % 2 ? -term : term);
    if (term < kSeriesTol * s) break;
  }
  return s;
}

double theta_density(double x) {
  double s = 0;
  for (int k = 0; k < 200; ++k) {
    const double c = theta_c(k);
    const double term = std::exp(-c / (x * x)) * 2 * c / (x * x * x) / (2.0 * k + 1);
    s += (k % 2 ? -term : term);
    if (k > 0 && term < kSeriesTol * std::abs(s)) break;
  }
  return 4 / kPi * s;
}

double images_density(double x) {
  double s = 0;
  for (int j = 0; j < 200; ++j) {
    const double o = 2.0 * j + 1;
    const double term = o * normal_pdf(o * x);
    s += (j % 2 ? -term : term);
    if (term < kSeriesTol * std::abs(s) || term == 0) break;
  }
  return 4 * s;
}

double sup_abs_pdf(double x) { return x < 1 ? theta_density(x) : images_density(x); }

constexpr double kLo = 0.02, kHi = 12.0;

// Solves log F(x) = target (upper = false) or log G(x) = target (upper = true).
double solve_log(double target, bool upper) {
  double lo = kLo, hi = kHi;
  double x = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double h = (upper ? log_sup_abs_sf(x) : log_sup_abs_cdf(x)) - target;
    if (h == 0) return x;
    // F increasing, G decreasing
    if ((h > 0) != upper)
      hi = x;
    else
      lo = x;
    const double f = sup_abs_pdf(x);
    const double dh = upper ? -f / sup_abs_sf(x) : f / sup_abs_cdf(x);
    double nx = x - h / dh;
    if (!(nx > lo && nx < hi) || !std::isfinite(nx)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-15 * x) return nx;
    x = nx;
    if (hi - lo <= 1e-15 * x) return x;
  }
  return x;
}

}  // namespace

double sup_abs_cdf_theta(double x) {
  if (x <= 0) return 0;
  return 4 / kPi * std::exp(-theta_c(0) / (x * x)) * theta_reduced(x);
}

double sup_abs_sf_images(double x) {
  if (x <= 0) return 1;
  double s = 0;
  for (int j = 0; j < 200; ++j) {
    const double term = normal_sf((2.0 * j + 1) * x);
    s += (j % 2 ? -term : term);
    if (term < kSeriesTol * std::abs(s) || term == 0) break;
  }
  return 4 * s;
}

double sup_abs_cdf(double x) {
  if (x <= 0) return 0;
  if (std::isinf(x)) return 1;
  return x < 1 ? sup_abs_cdf_theta(x) : 1 - sup_abs_sf_images(x);
}

double sup_abs_sf(double x) {
  if (x <= 0) return 1;
  if (std::isinf(x)) return 0;
  return x < 1 ? 1 - sup_abs_cdf_theta(x) : sup_abs_sf_images(x);
}

double log_sup_abs_cdf(double x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  if (x < 1) return std::log(4 / kPi) - theta_c(0) / (x * x) + std::log(theta_reduced(x));
  return std::log1p(-sup_abs_sf_images(x));
}

double log_sup_abs_sf(double x) {
  if (x <= 0) return 0;
  if (x < 1) return std::log1p(-sup_abs_cdf_theta(x));
  return std::log(sup_abs_sf_images(x));
}

double sup_abs_quantile(double p) {
  if (!(p > 0 && p < 1)) throw ConfigError("sup_abs_quantile: p must lie in (0,1)");
  return p <= 0.5 ? solve_log(std::log(p), false) : solve_log(std::log1p(-p), true);
}

namespace {

// x distributed as sup_{[0,1]}|B| from one uniform.
double draw_sup_abs(Rng& rng) {
  const double u = open_uniform(rng);
  // G(x) = u; for u >= 1/2 use F(x) = 1 - u, which is exact in floating point.
  return u < 0.5 ? solve_log(std::log(u), true) : solve_log(std::log(1 - u), false);
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0) || !std::isfinite(sigma2))
    throw ConfigError("Brownian motion needs a positive finite variance");
}

}  // namespace

std::vector<double> sample_sup_abs(double sigma2, std::int64_t trials, std::uint64_t seed) {
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  Rng rng = trial_rng(stream_seed(seed, "sup-abs"), 0);
  std::vector<double> out(static_cast<std::size_t>(trials));
  for (auto& v : out) v = sigma * draw_sup_abs(rng);
  return out;
}

double sample_exit_time(double sigma2, double eta, Rng& rng) {
  const double x = draw_sup_abs(rng);
  return eta * eta / sigma2 / (x * x);
}

WellSample sample_well_count(double sigma2, double t, double eta, Rng& rng) {
  check_sigma2(sigma2);
  if (!(eta > 0)) throw ConfigError("well count: eta must be positive");
  WellSample w;
  double time = 0;
  while (true) {
    time += sample_exit_time(sigma2, eta, rng);
    if (time > t) break;
    ++w.crossings;
  }
  w.wells = (w.crossings + 1) / 2;
  return w;
}

BMPath simulate(double sigma2, double T, double dt, std::uint64_t seed, std::uint64_t trial) {
  check_sigma2(sigma2);
  if (!(T > 0) || !(dt > 0)) throw ConfigError("simulate: T and dt must be positive");
  BMPath p;
  p.sigma2 = sigma2;
  p.T = T;
  p.dt = dt;
  p.seed = seed;
  p.trial = trial;
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(T / dt));
  p.samples.resize(steps + 1);
  p.samples[0] = 0;
  Rng rng = trial_rng(stream_seed(seed, "bm-path"), trial);
  std::normal_distribution<double> nd(0.0, std::sqrt(sigma2 * dt));
  for (Eigen::Index i = 1; i <= steps; ++i) p.samples[i] = p.samples[i - 1] + nd(rng);
  return p;
}

Eigen::Index well_count(const BMPath& path, double eta, double t) {
  if (!(t > 0) || t > path.T * (1 + 1e-12)) throw ConfigError("well_count: t must lie in (0, T]");
  const Eigen::Index last = std::min<Eigen::Index>(
      path.samples.size() - 1, static_cast<Eigen::Index>(std::floor(t / path.dt + 1e-9)));
  return count_crossings(path.samples.head(last + 1), eta).D;
}

RenewalRate renewal_rate(double sigma2, double K, std::int64_t trials, std::uint64_t seed,
                         RenewalMethod method, double dt, unsigned workers) {
  check_sigma2(sigma2);
  if (!(K > 0)) throw ConfigError("renewal_rate: K must be positive");
  RenewalRate r;
  r.sigma2 = sigma2;
  r.K = K;
  r.method = method;
  r.dt = method == RenewalMethod::Mesh ? dt : 0.0;
  r.pre_asymptotic = K < 5;
  const double T = K * K;
  const std::uint64_t s = stream_seed(seed, "renewal");
  auto vals = map_trials(static_cast<std::uint64_t>(trials), workers, [&](std::uint64_t t) {
    if (method == RenewalMethod::Exact) {
      Rng rng = trial_rng(s, t);
      return static_cast<double>(sample_well_count(sigma2, T, 1.0, rng).crossings) / T;
    }
    BMPath p = simulate(sigma2, T, dt, s, t);
    return static_cast<double>(count_crossings(p.samples, 1.0).C()) / T;
  });
  r.rate = mean_stderr(vals);
  return r;
}

Estimate bridge_exceedance(double x, double dt, std::int64_t paths, std::uint64_t seed,
                           unsigned workers) {
  if (!(x > 0)) throw ConfigError("bridge_exceedance: x must be positive");
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(1.0 / dt));
  const double h = 1.0 / static_cast<double>(steps);
  const std::uint64_t s = stream_seed(seed, "bridge");
  auto vals = map_trials(static_cast<std::uint64_t>(paths), workers, [&](std::uint64_t t) {
    Rng rng = trial_rng(s, t);
    std::normal_distribution<double> nd(0.0, std::sqrt(h));
    double b = 0, survive = 1;
    for (Eigen::Index i = 0; i < steps; ++i) {
      const double nb = b + nd(rng);
      if (std::abs(nb) >= x) return 1.0;
      const double up = std::exp(-2 * (x - b) * (x - nb) / h);
      const double lo = std::exp(-2 * (x + b) * (x + nb) / h);
      survive *= std::max(0.0, 1 - up - lo);
      b = nb;
    }
    return 1 - survive;
  });
  return mean_stderr(vals);
}

TailTable tail_check(double eta, double t, double sigma2, int m_max, std::int64_t trials,
                     std::uint64_t seed, unsigned workers) {
  check_sigma2(sigma2);
  if (m_max < 3) throw ConfigError("tail_check: m_max must be >= 3");
  TailTable tab;
  tab.eta = eta;
  tab.t = t;
  tab.sigma2 = sigma2;
  tab.trials = trials;
  const std::uint64_t s = stream_seed(seed, "tail");
  auto lam = map_trials(static_cast<std::uint64_t>(trials), workers, [&](std::uint64_t i) {
    Rng rng = trial_rng(s, i);
    return sample_well_count(sigma2, t, eta, rng).wells;
  });
  const double N = static_cast<double>(trials);
  for (int m = 0; m <= m_max; ++m) {
    std::int64_t c = 0;
    for (auto v : lam) c += v > m;
    TailRow row;
    row.m = m;
    row.p = c / N;
    row.std_error = std::sqrt(row.p * (1 - row.p) / N);
    tab.rows.push_back(row);
  }
  const double p2 = tab.rows[2].p, p3 = tab.rows[3].p;
  tab.fitted = p3 > 0 && p2 > p3;
  if (tab.fitted) {
    tab.b = std::log(p2 / p3) / 5;
    tab.a = p2 * std::exp(4 * tab.b);
    tab.below_envelope = true;
    for (auto& row : tab.rows) {
      row.envelope = tab.a * std::exp(-tab.b * row.m * row.m);
      if (row.m >= 2 && row.p > row.envelope * (1 + 1e-12)) tab.below_envelope = false;
    }
  }
  // Concavity of log p in m^2, up to three standard errors of the slopes.
  tab.concave = true;
  double prev_slope = 0, prev_var = 0;
  bool have_prev = false;
  for (int m = 0; m < m_max; ++m) {
    const auto& r0 = tab.rows[m];
    const auto& r1 = tab.rows[m + 1];
    if (r1.p * N < 10) break;
    if (r1.p > r0.p) tab.concave = false;
    const double dm = (m + 1.0) * (m + 1.0) - m * m;
    const double slope = (std::log(r1.p) - std::log(r0.p)) / dm;
    const double var = ((1 - r0.p) / (N * r0.p) + (1 - r1.p) / (N * r1.p)) / (dm * dm);
    if (have_prev && slope > prev_slope + 3 * std::sqrt(var + prev_var)) tab.concave = false;
    prev_slope = slope;
    prev_var = var;
    have_prev = true;
  }
  return tab;
}

MeshProbe mesh_probe(double sigma2, double t, double eta, double dt, std::int64_t paths,
                     std::uint64_t seed, unsigned workers) {
  const std::uint64_t s = stream_seed(seed, "mesh-probe");
  struct Row {
    double coarse, fine, exact;
  };
  auto rows = map_trials(static_cast<std::uint64_t>(paths), workers, [&](std::uint64_t i) {
    BMPath fine = simulate(sigma2, t, dt / 4, s, i);
    Eigen::ArrayXd coarse = Eigen::Map<const Eigen::ArrayXd, 0, Eigen::InnerStride<4>>(
        fine.samples.data(), (fine.samples.size() - 1) / 4 + 1);
    Rng rng = trial_rng(mix_seed(s, 1), i);
    return Row{static_cast<double>(count_crossings(coarse, eta).D),
               static_cast<double>(count_crossings(fine.samples, eta).D),
               static_cast<double>(sample_well_count(sigma2, t, eta, rng).wells)};
  });
  std::vector<double> c, f, e;
  for (const auto& r : rows) {
    c.push_back(r.coarse);
    f.push_back(r.fine);
    e.push_back(r.exact);
  }
  return {mean_stderr(c), mean_stderr(f), mean_stderr(e)};
}

void write_tail_csv(std::ostream& os, const TailTable& t) {
  const auto old = os.precision(17);
  os << "m,p,stderr,envelope\n";
  for (const auto& r : t.rows) os << r.m << ',' << r.p << ',' << r.std_error << ',' << r.envelope << '\n';
  os.precision(old);
}

void write_renewal_csv_header(std::ostream& os) { os << "sigma2,K,method,dt,rate,stderr,trials\n"; }

void write_renewal_csv_row(std::ostream& os, const RenewalRate& r) {
  const auto old = os.precision(17);
  os << r.sigma2 << ',' << r.K << ',' << (r.method == RenewalMethod::Exact ? "exact" : "mesh")
     << ',' << r.dt << ',' << r.rate.mean << ',' << r.rate.std_error << ',' << r.rate.trials
     << '\n';
  os.precision(old);
}

}  // namespace hop
