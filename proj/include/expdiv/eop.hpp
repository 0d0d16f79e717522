#pragma once

// The operator E, (Ef)(p^a) = f(a), and everything built on iterating it.

#include "expdiv/arith.hpp"
#include "expdiv/tower.hpp"

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace expdiv {

/// Ef: multiplicative, prime-independent, (Ef)(p^a) = f(a).
MultiplicativeSpec apply_E(const ArithmeticFunction& f);

/// f with f(a) = g(2^a) for a = 1..size. size <= 63 so that 2^a stays in range.
ValueTable apply_E_inverse(const MultiplicativeSpec& g, std::size_t size);

/// Exponential convolution: (f *e g)(p^n) = sum_{d|n} f(p^d) g(p^{n/d}).
MultiplicativeSpec exp_convolve(const MultiplicativeSpec& f, const MultiplicativeSpec& g);

/// Memoized E^m f(n). E^m f(prod p_i^{a_i}) = prod E^{m-1} f(a_i); E^0 f = f.
/// Safe for concurrent use: lookups take a shared lock, inserts a unique one.
class EPowerEvaluator {
public:
  explicit EPowerEvaluator(ArithmeticFunction f);

  Integer operator()(std::uint32_t m, std::uint64_t n) const;
  const ArithmeticFunction& base() const { return base_; }
  std::size_t memo_size() const;

private:
  struct Key {
    std::uint32_t m;
    std::uint64_t n;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.n * 0x9E3779B97F4A7C15ull ^ k.m);
    }
  };

  ArithmeticFunction base_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<Key, Integer, KeyHash> memo_;
};

Integer e_power_eval(const ArithmeticFunction& f, std::uint32_t m, std::uint64_t n);

/// Ascending elements of A(E^m f) = { n : E^m f(n) != 1 } up to a bound.
struct SupportProfile {
  std::string function;
  std::uint32_t m = 0;
  std::uint64_t bound = 0;
  std::vector<std::uint64_t> elements;
};

inline constexpr std::uint64_t kDefaultScanLimit = 10'000'000;

SupportProfile support_scan(const ArithmeticFunction& f, std::uint32_t m, std::uint64_t bound,
                            std::uint64_t scan_limit = kDefaultScanLimit);

/// n(f) = min { n : f(n) != 1 }, searched up to `search_limit`.
std::uint64_t min_support(const ArithmeticFunction& f, std::uint64_t search_limit = 1'000'000);

/// n(E^m f) via n(E^m f) = 2^{n(E^{m-1} f)}.
TowerInt tower_min(const ArithmeticFunction& f, std::uint32_t m,
                   std::uint64_t digit_bound = TowerInt::kDefaultDigitBound);

/// Iteration count after which n, 3n, ..., (2k-1)n (n = n(E^m f)) are the k
/// lowest elements of A(E^m f).
struct M0Bound {
  /// Total count of E applications to the original f.
  std::uint32_t m0 = 0;
  /// Preprocessing applications of E (0, 1 or 2): first to reach a
  /// prime-independent function whose n(f) is a power of two, then to reach
  /// n'(f) >= 2 n(f).
  std::uint32_t shifts = 0;
  bool shift_for_prime_independence = false;
  bool shift_for_second_element = false;
  /// m0 - shifts: iterations counted from the preprocessed function.
  std::uint32_t m_after_preprocessing = 0;
  TowerInt n_at_m0;
};

M0Bound m0_bound(const ArithmeticFunction& f, std::uint32_t k);

/// True when a table agrees with a multiplicative prime-independent function on
/// its whole range.
bool is_multiplicative_prime_independent(const ValueTable& f);

/// Desk-scale view of Ef(n) << n^eps: max over n of
/// log Ef(n) log log n / log n against sup_a log f(a) / a.
struct GrowthStatistic {
  std::uint64_t limit = 0;
  double max_ratio = 0;
  std::uint64_t argmax = 0;
  double local_sup = 0;
  std::uint32_t local_sup_range = 0;
  /// max_ratio <= 1.5 * local_sup; informational only.
  bool within_half_margin = false;
};

GrowthStatistic growth_statistic(const MultiplicativeSpec& f, std::uint64_t limit, std::uint32_t local_range = 40);

}  // namespace expdiv
