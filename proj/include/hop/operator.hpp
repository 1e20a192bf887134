#ifndef HOP_OPERATOR_HPP
#define HOP_OPERATOR_HPP

#include <vector>

#include <Eigen/Core>

#include "hop/signed_log.hpp"
#include "hop/weights.hpp"

namespace hop {

/// Zero-diagonal symmetric tridiagonal matrix of size n+1 with
/// off-diagonal entries a_1..a_n. Entries may be zero only after cut_edge.
struct FiniteOperator {
  Eigen::ArrayXd a;
  Eigen::ArrayXd loga;  // log|a_k|, -inf for a cut edge
  Provenance provenance;

  FiniteOperator() = default;
  explicit FiniteOperator(const WeightSequence& w);

  Eigen::Index n() const { return a.size(); }
  Eigen::Index dimension() const { return a.size() + 1; }
};

struct NegCount {
  Eigen::Index count = 0;
  int nudges = 0;      // number of perturbations applied to x
  SignedLog x_used;    // the point actually evaluated
};

/// Number of eigenvalues strictly below x, from the signs of the LDL^T
/// pivots of H - x, all in log coordinates. A cancelled pivot moves x by a
/// relative 16 tol 4^j (j = 0,1,2); a fourth cancellation throws
/// SpectralCollision.
NegCount negcount(const FiniteOperator& op, SignedLog x);
NegCount negcount(const FiniteOperator& op, double x);

struct WindowCount {
  Eigen::Index positive = 0;  // M+ = #eigenvalues in (0, lambda)
  Eigen::Index window = 0;    // #eigenvalues in (-lambda, lambda) = 2 M+
  int nudges = 0;
};

/// Requires odd n and lambda > 0; throws ConfigError otherwise.
WindowCount count_in_window(const FiniteOperator& op, SignedLog lambda);

/// All n+1 eigenvalues by bisection on negcount, to 1e-12 absolute.
/// Limited to n <= 64.
std::vector<double> eigenvalues_oracle(const FiniteOperator& op);

/// Sets a_k = 0 (1-based), splitting the chain into two blocks.
FiniteOperator cut_edge(const FiniteOperator& op, Eigen::Index k);

/// sup_x |F1(x) - F2(x)| for the empirical measures with equal atoms on the
/// sorted inputs. Atoms within tol * max(1, max|e|) of each other count as one
/// location. Throws ConfigError on a length mismatch.
inline constexpr double kKolmogorovTieTol = 1e-10;
double kolmogorov_distance(const std::vector<double>& e1, const std::vector<double>& e2,
                           double tol = kKolmogorovTieTol);

/// Same supremum scaled by the common length: an exact integer.
Eigen::Index kolmogorov_count(const std::vector<double>& e1, const std::vector<double>& e2,
                              double tol = kKolmogorovTieTol);

}  // namespace hop

#endif  // HOP_OPERATOR_HPP
