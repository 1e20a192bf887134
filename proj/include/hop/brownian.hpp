#ifndef HOP_BROWNIAN_HPP
#define HOP_BROWNIAN_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "hop/rng.hpp"
#include "hop/stats.hpp"

namespace hop {

/// Gaussian random walk sampling of a Brownian motion with variance sigma2
/// per unit time on [0, T].
struct BMPath {
  double sigma2 = 1;
  double T = 1;
  double dt = 1e-4;
  Eigen::ArrayXd samples;  // samples[0] = 0, samples[i] = B(i dt)
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

BMPath simulate(double sigma2, double T, double dt, std::uint64_t seed, std::uint64_t trial = 0);

/// Lambda(t, eta): eta-downcrossings (equivalently disjoint eta-wells) of the
/// path on [0, t].
Eigen::Index well_count(const BMPath& path, double eta, double t);

// Law of sup_{[0,1]} |B| for standard Brownian motion.

/// (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 / (8 x^2)); accurate for small x.
double sup_abs_cdf_theta(double x);
/// 4 sum_j (-1)^j Q((2j+1) x), Q the normal upper tail; accurate for large x.
double sup_abs_sf_images(double x);
double sup_abs_cdf(double x);
double sup_abs_sf(double x);
double log_sup_abs_cdf(double x);
double log_sup_abs_sf(double x);
/// x with sup_abs_cdf(x) = p, for p in (0,1).
double sup_abs_quantile(double p);

/// sigma * sup_{[0,1]} |B| samples, by inversion.
std::vector<double> sample_sup_abs(double sigma2, std::int64_t trials, std::uint64_t seed);

/// Exit time of (-eta, eta) for Brownian motion with variance sigma2.
double sample_exit_time(double sigma2, double eta, Rng& rng);

struct WellSample {
  std::int64_t crossings = 0;  // eta-crossings on [0, t]
  std::int64_t wells = 0;      // eta-downcrossings = ceil(crossings / 2)
};

/// Crossing times of level eta form a renewal process whose gaps are exit
/// times of (-eta, eta) (the reflected process M - B is again a reflected
/// Brownian motion), so the count is sampled exactly without a mesh.
WellSample sample_well_count(double sigma2, double t, double eta, Rng& rng);

enum class RenewalMethod { Exact, Mesh };

struct RenewalRate {
  double sigma2 = 0;
  double K = 0;
  RenewalMethod method = RenewalMethod::Exact;
  double dt = 0;
  Estimate rate;  // E C_K / K^2, C_K the 1-crossings on [0, K^2]
  bool pre_asymptotic = false;  // K < 5
};

RenewalRate renewal_rate(double sigma2, double K, std::int64_t trials, std::uint64_t seed,
                         RenewalMethod method = RenewalMethod::Exact, double dt = 0.01,
                         unsigned workers = 1);

/// P(sup_{[0,1]} |B| >= x) for standard Brownian motion, estimated on a mesh
/// of width dt with the Brownian-bridge correction for barrier crossings
/// between mesh points.
Estimate bridge_exceedance(double x, double dt, std::int64_t paths, std::uint64_t seed,
                           unsigned workers = 1);

struct TailRow {
  int m = 0;
  double p = 0;         // P(Lambda > m)
  double std_error = 0;
  double envelope = 0;  // a exp(-b m^2)
};

struct TailTable {
  double eta = 1, t = 1, sigma2 = 1;
  std::int64_t trials = 0;
  std::vector<TailRow> rows;  // m = 0..m_max
  double a = 0, b = 0;
  bool fitted = false;          // P(Lambda>2) > P(Lambda>3) > 0
  bool below_envelope = false;  // p <= envelope for 2 <= m <= m_max
  bool concave = false;         // log p vs m^2 concave where p > 0
};

TailTable tail_check(double eta, double t, double sigma2, int m_max, std::int64_t trials,
                     std::uint64_t seed, unsigned workers = 1);

/// Mean mesh well count at dt and dt/4 next to the exact renewal value.
struct MeshProbe {
  Estimate coarse, fine, exact;
};
MeshProbe mesh_probe(double sigma2, double t, double eta, double dt, std::int64_t paths,
                     std::uint64_t seed, unsigned workers = 1);

void write_tail_csv(std::ostream& os, const TailTable& t);
void write_renewal_csv_header(std::ostream& os);
void write_renewal_csv_row(std::ostream& os, const RenewalRate& r);

}  // namespace hop

#endif  // HOP_BROWNIAN_HPP
