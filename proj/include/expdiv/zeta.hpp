#pragma once

// Riemann zeta at real arguments by Euler–Maclaurin summation with an explicit
// remainder bound. Templated on the real scalar: use long double up to ~18
// digits and Real (MPFR) with enough precision beyond that.

#include "expdiv/numeric.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace expdiv {

/// Exact B_0, B_2, B_4, ..., B_{2n} (B_1 omitted).
const std::vector<Rational>& even_bernoulli(std::size_t count);

namespace detail {

template <class T>
T convert(const Rational& q) {
  if constexpr (std::is_same_v<T, Real>) {
    return Real(numerator(q)) / Real(denominator(q));
  } else {
    return q.convert_to<T>();
  }
}

template <class T>
T pow_real(const T& x, const T& y) {
  using std::pow;
  using boost::multiprecision::pow;
  return pow(x, y);
}

template <class T>
T abs_real(const T& x) {
  using std::abs;
  using boost::multiprecision::abs;
  return abs(x);
}

}  // namespace detail

/// Result of a zeta evaluation together with its remainder bound.
template <class T>
struct ZetaValue {
  T value;
  T error_bound;
};

/// ζ(σ) for real σ ≠ 1 with |remainder| <= 10^(-digits).
///
/// The tail is cut at N and corrected with p Bernoulli terms. For real s with
/// s + 2p + 1 > 0 the remainder is bounded by the first omitted term, so p
/// grows until that term falls below the target.
template <class T>
ZetaValue<T> zeta_real_checked(const T& sigma, int digits) {
  if (sigma == T(1)) throw DomainError("zeta_real: pole at sigma = 1");
  if (digits < 1 || digits > 50) throw DomainError("zeta_real: precision must be in 1..50 digits");

  const T target = detail::pow_real(T(10), T(-digits));
  const auto& bern = even_bernoulli(80);

  // N grows with the requested precision; 2p stays well below 2πN so the
  // asymptotic series is still decreasing when it is cut.
  const int N = 10 + 2 * digits;
  const T n_big = T(N);

  T sum = 0;
  for (int n = 1; n < N; ++n) sum += detail::pow_real(T(n), -sigma);
  const T n_pow = detail::pow_real(n_big, -sigma);  // N^{-s}
  sum += n_big * n_pow / (sigma - T(1));
  sum += n_pow / T(2);

  // term_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  T rising = sigma;          // s(s+1)...(s+2k-2) for k = 1
  T n_factor = n_pow / n_big;  // N^{-s-1}
  T factorial = 2;           // (2k)!
  for (std::size_t k = 1; k + 1 < bern.size(); ++k) {
    T term = detail::convert<T>(bern[k]) / factorial * rising * n_factor;
    sum += term;

    // First omitted term, k+1.
    T next_rising = rising * (sigma + T(2 * k - 1)) * (sigma + T(2 * k));
    T next_factorial = factorial * T(2 * k + 1) * T(2 * k + 2);
    T next_factor = n_factor / (n_big * n_big);
    T next = detail::abs_real(T(detail::convert<T>(bern[k + 1]) / next_factorial * next_rising * next_factor));
    bool real_bound_applies = sigma + T(2 * k + 1) > T(0);
    if (real_bound_applies && next < target) return {sum, next};
    rising = next_rising;
    factorial = next_factorial;
    n_factor = next_factor;
  }
  throw DomainError("zeta_real: remainder bound not reached for this argument");
}

template <class T>
T zeta_real(const T& sigma, int digits) {
  return zeta_real_checked(sigma, digits).value;
}

/// Convenience for exact rational arguments.
template <class T>
T zeta_real(const Rational& sigma, int digits) {
  return zeta_real<T>(detail::convert<T>(sigma), digits);
}

}  // namespace expdiv
