#ifndef HOP_SIGNED_LOG_HPP
#define HOP_SIGNED_LOG_HPP

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

namespace hop {

/// Relative tolerance below which a signed subtraction is treated as a
/// cancellation (the two magnitudes are considered equal).
inline constexpr double kCancellationTol = 1e-12;

/// A real number stored as sign * exp(logmag).
///
/// Zero is {0, -inf}; infinities are {+-1, +inf}. Multiplication and
/// division are exact up to one rounding of the log; addition is done with
/// log1p/exp so that values like exp(-1e4) never underflow.
template <typename Real>
struct BasicSignedLog {
  int sign = 0;
  Real logmag = -std::numeric_limits<Real>::infinity();

  static constexpr Real inf() { return std::numeric_limits<Real>::infinity(); }

  static BasicSignedLog zero() { return {}; }
  static BasicSignedLog infinity(int s = 1) { return {s, inf()}; }

  /// sign * exp(log_magnitude)
  static BasicSignedLog from_log(Real log_magnitude, int s = 1) {
    if (s == 0 || log_magnitude == -inf()) return zero();
    return {s > 0 ? 1 : -1, log_magnitude};
  }

  static BasicSignedLog from_value(Real v) {
    if (v == Real(0)) return zero();
    return {v > 0 ? 1 : -1, std::log(std::abs(v))};
  }

  Real value() const {
    if (sign == 0) return Real(0);
    return Real(sign) * std::exp(logmag);
  }

  bool is_zero() const { return sign == 0; }
  bool is_infinite() const { return sign != 0 && logmag == inf(); }
  bool is_finite() const { return sign == 0 || std::isfinite(logmag); }

  BasicSignedLog operator-() const { return {-sign, logmag}; }

  BasicSignedLog reciprocal() const {
    if (sign == 0) return infinity(1);
    return {sign, -logmag};
  }
};

using SignedLog = BasicSignedLog<double>;

template <typename Real>
BasicSignedLog<Real> operator*(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.logmag + b.logmag};
}

template <typename Real>
BasicSignedLog<Real> operator/(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  return a * b.reciprocal();
}

/// Result of a signed log-domain addition. `cancelled` is set when the
/// operands had opposite signs and magnitudes within `tol` of each other.
template <typename Real>
struct SumResult {
  BasicSignedLog<Real> value;
  bool cancelled = false;
};

template <typename Real>
SumResult<Real> add(BasicSignedLog<Real> a, BasicSignedLog<Real> b,
                    Real tol = Real(kCancellationTol)) {
  if (a.sign == 0) return {b, false};
  if (b.sign == 0) return {a, false};
  const bool a_big = a.logmag >= b.logmag;
  const BasicSignedLog<Real>& hi = a_big ? a : b;
  const BasicSignedLog<Real>& lo = a_big ? b : a;
  if (hi.logmag == BasicSignedLog<Real>::inf()) {
    // inf + (-inf) has no meaningful value; report it as a cancellation.
    if (lo.logmag == hi.logmag && lo.sign != hi.sign) return {{}, true};
    return {hi, false};
  }
  const Real gap = lo.logmag - hi.logmag;  // <= 0
  if (a.sign == b.sign) {
    return {{hi.sign, hi.logmag + std::log1p(std::exp(gap))}, false};
  }
  if (-gap <= tol) return {{}, true};
  return {{hi.sign, hi.logmag + std::log1p(-std::exp(gap))}, false};
}

template <typename Real>
BasicSignedLog<Real> operator+(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  return add(a, b, Real(0)).value;
}

template <typename Real>
BasicSignedLog<Real> operator-(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  return a + (-b);
}

template <typename Real>
std::partial_ordering operator<=>(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  if (a.sign != b.sign) return a.sign <=> b.sign;
  if (a.sign == 0) return std::partial_ordering::equivalent;
  if (a.sign > 0) return a.logmag <=> b.logmag;
  return b.logmag <=> a.logmag;
}

template <typename Real>
bool operator==(BasicSignedLog<Real> a, BasicSignedLog<Real> b) {
  return a.sign == b.sign && (a.sign == 0 || a.logmag == b.logmag);
}

template <typename Real>
std::ostream& operator<<(std::ostream& os, BasicSignedLog<Real> x) {
  if (x.sign == 0) return os << "0";
  return os << (x.sign > 0 ? "+" : "-") << "exp(" << x.logmag << ")";
}

}  // namespace hop

#endif  // HOP_SIGNED_LOG_HPP
