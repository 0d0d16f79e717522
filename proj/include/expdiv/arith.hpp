#pragma once

// Base arithmetic: factorization, the classical divisor-type functions and a
// symbolic descriptor for multiplicative functions.

#include "expdiv/numeric.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace expdiv {

struct PrimePower {
  std::uint64_t p;
  std::uint32_t a;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical factorization, ascending by prime. Empty for n = 1.
using Factorization = std::vector<PrimePower>;

/// Smallest-prime-factor table over [0, limit]. Immutable after construction,
/// so one instance can be shared by any number of readers.
class SpfSieve {
public:
  explicit SpfSieve(std::uint32_t limit);

  std::uint32_t limit() const { return limit_; }
  std::uint32_t smallest_factor(std::uint32_t n) const { return spf_[n]; }
  bool is_prime(std::uint32_t n) const { return n >= 2 && spf_[n] == n; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  /// Requires 1 <= n <= limit().
  Factorization factorize(std::uint32_t n) const;

private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

/// Sieve bound from EXPDIV_SIEVE_BOUND, default 10^8.
std::uint64_t configured_sieve_bound();

/// Process-wide table used by factorize(); sized min(configured bound, 2^22).
const SpfSieve& shared_sieve();

bool is_prime(std::uint64_t n);

/// Full factorization of n >= 1; table lookup inside the shared sieve,
/// trial division plus Pollard rho above it.
Factorization factorize(std::uint64_t n);

std::uint64_t reconstruct(const Factorization& f);

std::vector<std::uint64_t> divisors(std::uint64_t n);

/// Number of ordered (d_1..d_k) with prod d_i^{a_i} = n.
Integer tau_multi(std::span<const std::uint32_t> exponents, std::uint64_t n);
Integer tau_k(std::uint32_t k, std::uint64_t n);
/// mu(m) if n = m^k, else 0.
int mobius_scaled(std::uint32_t k, std::uint64_t n);
/// Dirichlet inverse of tau_k.
Integer mobius_power(std::uint32_t k, std::uint64_t n);
/// Number of Gaussian-integer divisors of n, counted up to units.
Integer gauss_tau(std::uint64_t n);

Integer binomial(std::uint64_t n, std::uint64_t k);

// ---------------------------------------------------------------------------
// Function descriptors

class ValueTable;
class MultiplicativeSpec;

/// Anything the E-operator accepts: a multiplicative spec or an explicit table.
using ArithmeticFunction = std::variant<MultiplicativeSpec, ValueTable>;

/// Explicit arithmetic function on 1..size(); index 0 is unused.
class ValueTable {
public:
  ValueTable() = default;
  explicit ValueTable(std::vector<Integer> values_from_one);

  std::size_t size() const { return values_.size() - 1; }
  const Integer& operator()(std::uint64_t n) const;
  const std::vector<Integer>& raw() const { return values_; }

  friend ValueTable operator+(const ValueTable& f, const ValueTable& g);
  friend ValueTable operator*(const ValueTable& f, const ValueTable& g);
  friend bool operator==(const ValueTable&, const ValueTable&) = default;

  /// Tabulates any descriptor on 1..size.
  static ValueTable tabulate(const MultiplicativeSpec& f, std::size_t size);

private:
  std::vector<Integer> values_{Integer(0)};
};

namespace rule {
struct One {};
struct TauMulti { std::vector<std::uint32_t> exponents; };
struct TauK { std::uint32_t k; };
struct MobiusScaled { std::uint32_t k; };
struct MobiusPower { std::uint32_t k; };
struct GaussTau {};
/// E^m applied to a base function.
struct EPower {
  std::shared_ptr<const ArithmeticFunction> base;
  std::uint32_t m;
};
/// Exponential convolution of two multiplicative functions.
struct ExpConvolution {
  std::shared_ptr<const MultiplicativeSpec> f;
  std::shared_ptr<const MultiplicativeSpec> g;
};
}  // namespace rule

/// Symbolic multiplicative function, evaluable at any prime power.
class MultiplicativeSpec {
public:
  using Rule = std::variant<rule::One, rule::TauMulti, rule::TauK, rule::MobiusScaled,
                            rule::MobiusPower, rule::GaussTau, rule::EPower,
                            rule::ExpConvolution>;

  MultiplicativeSpec() : rule_(rule::One{}) {}
  explicit MultiplicativeSpec(Rule r);

  static MultiplicativeSpec one() { return MultiplicativeSpec(rule::One{}); }
  static MultiplicativeSpec tau() { return tau_k(2); }
  static MultiplicativeSpec tau_k(std::uint32_t k);
  static MultiplicativeSpec tau_multi(std::vector<std::uint32_t> exponents);
  static MultiplicativeSpec mobius_scaled(std::uint32_t k);
  static MultiplicativeSpec mobius_power(std::uint32_t k);
  static MultiplicativeSpec gauss_tau() { return MultiplicativeSpec(rule::GaussTau{}); }
  /// E^m f; E^0 f is f itself when f is a spec.
  static MultiplicativeSpec e_power(const ArithmeticFunction& base, std::uint32_t m);

  const Rule& rule() const { return rule_; }

  /// f(p^a); f(p^0) = 1.
  Integer at_prime_power(std::uint64_t p, std::uint32_t a) const;
  Integer operator()(std::uint64_t n) const;

  bool prime_independent() const;
  std::string name() const;

private:
  Rule rule_;
};

/// Evaluates either alternative at a positive integer.
Integer evaluate(const ArithmeticFunction& f, std::uint64_t n);
std::string name_of(const ArithmeticFunction& f);

/// Dirichlet convolution of two tables over their common range.
ValueTable dirichlet_convolve(const ValueTable& f, const ValueTable& g);

}  // namespace expdiv
