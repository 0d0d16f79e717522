#pragma once

// Integers of the form 2^2^...^v that outgrow any materializable size.

#include "expdiv/numeric.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace expdiv {

/// Either an exact natural number or mult * 2^exponent + add, where exponent
/// is itself a TowerInt and the value exceeds the digit bound. mult and add
/// stay small (doubling and +1 only), so ordering is decided by the exponent
/// except when two exponents differ by a few units.
class TowerInt {
public:
  static constexpr std::uint64_t kDefaultDigitBound = 1'000'000;

  TowerInt() : TowerInt(Integer(0)) {}
  TowerInt(Integer exact);  // NOLINT: implicit from exact values
  TowerInt(std::uint64_t exact) : TowerInt(Integer(exact)) {}

  /// 2^e, materialized when it has at most digit_bound decimal digits.
  static TowerInt pow2(const TowerInt& e, std::uint64_t digit_bound = kDefaultDigitBound);

  bool is_exact() const { return !exponent_; }
  const Integer& exact() const;
  /// Exact value when it fits in 64 bits.
  std::optional<std::uint64_t> to_u64() const;

  TowerInt doubled() const { return times(2); }
  /// Multiplication by a small factor.
  TowerInt times(std::uint64_t k) const;
  TowerInt plus_one() const;
  TowerInt operator+(std::int64_t small) const;

  /// Number of stacked exponentiations above base(); powers of two above
  /// 2^64 count as one more level.
  std::uint32_t height() const;
  Integer base() const;

  std::string to_string() const;

  friend std::strong_ordering operator<=>(const TowerInt& a, const TowerInt& b);
  friend bool operator==(const TowerInt& a, const TowerInt& b) { return (a <=> b) == 0; }

private:
  TowerInt(std::shared_ptr<const TowerInt> exponent, Integer mult, Integer add);

  // Exact when exponent_ is null.
  Integer exact_;
  std::shared_ptr<const TowerInt> exponent_;
  Integer mult_;
  Integer add_;

  friend std::optional<Integer> small_difference(const TowerInt& a, const TowerInt& b);
};

/// b - a when it is known to be small (fits comfortably in a machine word);
/// nullopt when the difference is astronomically large.
std::optional<Integer> small_difference(const TowerInt& a, const TowerInt& b);

}  // namespace expdiv
