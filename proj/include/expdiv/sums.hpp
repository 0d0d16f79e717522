#pragma once

// Partial sums of multiplicative functions, their Euler-product constants and
// error-term fits.

#include "expdiv/arith.hpp"
#include "expdiv/bell.hpp"
#include "expdiv/tower.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace expdiv {

inline constexpr std::uint64_t kMaxSumBound = 100'000'000;

/// f(0..x_max) as machine integers (index 0 unused); throws when the table
/// exceeds the memory budget or a value does not fit in 64 bits.
std::vector<std::int64_t> sieve_values(const MultiplicativeSpec& f, std::uint64_t x_max,
                                       std::size_t memory_budget = std::size_t(1) << 30);

/// Geometric checkpoints from `start` to `stop` with `per_decade` points per
/// decade (2 gives ratio sqrt(10)); always includes both ends.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t start = 1000, std::uint64_t stop = 10'000'000,
                                                 unsigned per_decade = 2);

struct SumOptions {
  std::uint64_t shard_size = std::uint64_t(1) << 21;
  unsigned threads = 1;
  /// Directory for resumable shard files; empty disables persistence.
  std::string state_dir;
};

/// Reads key=value lines: checkpoints=a,b,... or start/stop/per_decade, plus
/// shard_size, threads and state_dir. '#' starts a comment.
struct SumConfig {
  std::vector<std::uint64_t> checkpoints;
  SumOptions options;
};
SumConfig parse_sum_config(const std::string& text);
SumConfig load_sum_config(const std::string& path);

struct CheckpointSums {
  std::string function;
  std::vector<std::uint64_t> checkpoints;
  std::vector<Integer> sums;
  std::size_t shards_computed = 0;
  std::size_t shards_loaded = 0;
};

/// Exact sum_{n <= x_i} f(n) by a segmented multiplicative sieve.
CheckpointSums checkpoint_sums(const MultiplicativeSpec& f, const std::vector<std::uint64_t>& checkpoints,
                               const SumOptions& options = {});

/// Stable 64-bit FNV-1a of the function name, hex, for shard file names.
std::string spec_hash(const MultiplicativeSpec& f);

// ---------------------------------------------------------------------------
// Euler-product constants

template <class T>
struct EulerValue {
  T value{};
  /// Bound on the discarded prime tail (relative, on the product).
  T tail_bound{};
  std::uint64_t prime_limit = 0;
};

template <class T>
struct EulerConstants {
  /// Residue at s = 1 of sum f(n) n^{-s}, via the zeta word.
  EulerValue<T> mean_a;
  /// prod_p (1 + sum_{a>=l} (f(p^a) - f(p^{a-1})) / p^a), by direct product.
  std::optional<EulerValue<T>> c_f;
  /// First nonzero residual degree of the word (lowest over sampled primes).
  std::uint64_t residual_order = 0;
};

/// MeanA = prod_{a != 1} zeta(a)^{e_a} * H(1), H the residual Euler product,
/// plus C_f when f(p) = 1 for every prime (l = 2). digits <= 15 for long
/// double; use Real for more.
template <class T = long double>
EulerConstants<T> euler_constants(const MultiplicativeSpec& f, const ZetaWord& word, int digits = 10,
                                  std::uint64_t direct_prime_limit = 10'000'000);

/// Coefficient of x^{1/b} in sum_{n<=x} f(n) for a simple pole of the word at
/// s = 1/b: zeta(1/b) prod_{a not in {1,b}} zeta(a/b)^{e_a} * H(1/b).
template <class T = long double>
EulerValue<T> secondary_constant(const MultiplicativeSpec& f, const ZetaWord& word, std::uint64_t b,
                                 int digits = 8);

/// MeanB for E^{m+1} tau at scale n(E^m tau); m = 2 only (higher scales need
/// residual series beyond reach). m = 1 uses the greedy word and is gated.
template <class T = long double>
EulerValue<T> secondary_constant_level(std::uint32_t m, int digits = 8, bool allow_level_one = false);

/// Greedy word for f up to the given degree, with its residual order.
ZetaWord greedy_word(const MultiplicativeSpec& f, Eigen::Index degree);

// ---------------------------------------------------------------------------
// Fits

struct MainTerms {
  long double mean_a = 0;
  long double mean_b = 0;
  /// Secondary term exponent 1/scale; 0 disables it.
  std::uint64_t scale = 0;
  /// Fit x^{1/scale} P(log x) with deg P = log_degree instead of using mean_b.
  std::optional<unsigned> fit_log_degree;
};

struct FitRow {
  std::uint64_t x = 0;
  Integer sum;
  long double main = 0;
  long double secondary = 0;
  long double delta = 0;
};

struct FitReport {
  std::string function;
  MainTerms terms;
  std::vector<long double> fitted_log_poly;
  std::vector<FitRow> rows;
  bool exact_zero = false;
  std::optional<long double> slope;
  long double max_abs_delta = 0;
  std::string predicted_exponent;
};

FitReport fit_error_exponent(const CheckpointSums& cs, const MainTerms& terms, const std::string& predicted = "");

/// CSV with columns x,sum,main,secondary,delta.
void write_csv(std::ostream& out, const FitReport& r);

// ---------------------------------------------------------------------------

struct MinElementsCheck {
  enum class Status { Pass, Fail, Inconclusive } status = Status::Inconclusive;
  std::uint32_t m = 0;
  std::uint64_t bound = 0;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> elements;
  /// First support element that is not an odd multiple of n.
  std::optional<std::uint64_t> first_other;
  /// min{3^r, 2^{r'}} with r < r' the two lowest elements of A(E^{m-1} tau).
  std::optional<Integer> other_lower_bound;
  std::string detail;
};

/// The support of E^m tau starts n, 3n, 5n (n = n(E^m tau)) and stays on odd
/// multiples of n until the first element of the other kind.
MinElementsCheck verify_min_elements(std::uint32_t m, std::uint64_t bound);

std::string to_string(MinElementsCheck::Status s);

}  // namespace expdiv
