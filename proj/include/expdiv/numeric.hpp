#pragma once

// Scalar types shared by every module. Exact work uses GMP-backed integers and
// rationals; real-valued work (zeta values, Euler products) is templated on
// the scalar and instantiated for long double or MPFR.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace expdiv {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
/// Variable-precision binary float; set precision with Real::default_precision.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

/// Raised for violated preconditions (bad arguments, out-of-range parameters).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Canonical "p/q" rendering; integers render without a denominator.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Parses "p/q", "p", or a finite decimal such as "0.25".
Rational parse_rational(std::string_view text);

Integer numerator(const Rational& q);
Integer denominator(const Rational& q);

/// 2^e as an exact integer.
Integer pow2(std::uint64_t e);

Rational pow(const Rational& base, int exponent);

inline long double to_long_double(const Rational& q) {
  return q.convert_to<long double>();
}

}  // namespace expdiv
