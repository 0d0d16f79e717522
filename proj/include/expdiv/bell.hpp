#pragma once

// Truncated local (Bell) series at a prime and formal zeta products acting on
// them. Series are dense coefficient vectors templated on the scalar; the
// factorization and verification routines use exact rationals.

#include "expdiv/arith.hpp"
#include "expdiv/tower.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace expdiv {

/// c_0 + c_1 x + ... + c_T x^T (mod x^{T+1}).
template <class Scalar>
class LocalSeries {
public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LocalSeries() : LocalSeries(0) {}
  /// The unit series 1 + O(x^{T+1}).
  explicit LocalSeries(Eigen::Index order) : c_(Coefficients::Zero(order + 1)) { c_(0) = Scalar(1); }
  explicit LocalSeries(Coefficients c) : c_(std::move(c)) {}

  Eigen::Index order() const { return c_.size() - 1; }
  const Scalar& operator[](Eigen::Index n) const { return c_(n); }
  Scalar& operator[](Eigen::Index n) { return c_(n); }
  const Coefficients& coefficients() const { return c_; }

  LocalSeries truncated(Eigen::Index order) const {
    Coefficients c = Coefficients::Zero(order + 1);
    Eigen::Index n = std::min(order, this->order());
    c.head(n + 1) = c_.head(n + 1);
    return LocalSeries(std::move(c));
  }

  friend LocalSeries operator*(const LocalSeries& a, const LocalSeries& b) {
    Eigen::Index T = std::min(a.order(), b.order());
    Coefficients c = Coefficients::Zero(T + 1);
    for (Eigen::Index i = 0; i <= T; ++i) {
      if (a.c_(i) == Scalar(0)) continue;
      for (Eigen::Index j = 0; i + j <= T; ++j) c(i + j) += a.c_(i) * b.c_(j);
    }
    return LocalSeries(std::move(c));
  }

  /// Exact division; the divisor must have an invertible constant term.
  friend LocalSeries operator/(const LocalSeries& a, const LocalSeries& b) {
    if (b.c_(0) == Scalar(0)) throw DomainError("LocalSeries: division by a non-unit series");
    Eigen::Index T = std::min(a.order(), b.order());
    Coefficients q = Coefficients::Zero(T + 1);
    for (Eigen::Index n = 0; n <= T; ++n) {
      Scalar acc = a.c_(n);
      for (Eigen::Index j = 1; j <= n; ++j) acc -= b.c_(j) * q(n - j);
      q(n) = acc / b.c_(0);
    }
    return LocalSeries(std::move(q));
  }

  friend bool operator==(const LocalSeries& a, const LocalSeries& b) {
    return a.order() == b.order() && a.c_ == b.c_;
  }

  /// Multiplies in place by (1 - x^d)^e for integer e.
  void multiply_binomial(Eigen::Index d, long e) {
    if (d <= 0 || d > order()) return;
    for (long i = 0; i < e; ++i)
      for (Eigen::Index n = order(); n >= d; --n) c_(n) -= c_(n - d);
    for (long i = 0; i < -e; ++i)
      for (Eigen::Index n = d; n <= order(); ++n) c_(n) += c_(n - d);
  }

  /// Lowest degree >= 1 with a nonzero coefficient.
  std::optional<Eigen::Index> first_nonzero_above_constant() const {
    for (Eigen::Index n = 1; n <= order(); ++n)
      if (c_(n) != Scalar(0)) return n;
    return std::nullopt;
  }

private:
  Coefficients c_;
};

using ExactSeries = LocalSeries<Rational>;

/// One factor zeta(scale * s)^exponent; local factor (1 - x^scale)^(-exponent).
struct ZetaFactor {
  TowerInt scale;
  long exponent = 0;
  friend bool operator==(const ZetaFactor&, const ZetaFactor&) = default;
};

/// Formal product of zeta factors with distinct scales, sorted by scale.
class ZetaWord {
public:
  ZetaWord() = default;
  explicit ZetaWord(std::vector<ZetaFactor> factors, std::optional<std::uint64_t> claimed_order = std::nullopt);

  const std::vector<ZetaFactor>& factors() const { return factors_; }
  /// Residual order T': the quotient series is 1 + O(x^{T'}).
  const std::optional<std::uint64_t>& claimed_order() const { return claimed_order_; }
  void set_claimed_order(std::optional<std::uint64_t> t) { claimed_order_ = t; }

  /// Exponent at a scale, 0 when absent.
  long exponent_at(const TowerInt& scale) const;

  /// Parses "1:1,16:1,17:-1".
  static ZetaWord parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const ZetaWord& a, const ZetaWord& b) { return a.factors_ == b.factors_; }

private:
  std::vector<ZetaFactor> factors_;
  std::optional<std::uint64_t> claimed_order_;
};

/// Coefficients f(p^n), n <= T. Pass p = 0 for a prime-independent function.
ExactSeries local_series(const MultiplicativeSpec& f, Eigen::Index order, std::uint64_t p = 0);

/// Expansion of prod (1 - x^a)^(-e) to order T; scales above T contribute 1.
template <class Scalar = Rational>
LocalSeries<Scalar> word_local_factor(const ZetaWord& w, Eigen::Index order) {
  LocalSeries<Scalar> s(order);
  for (const auto& f : w.factors()) {
    auto a = f.scale.to_u64();
    if (!a || *a > static_cast<std::uint64_t>(order)) continue;
    s.multiply_binomial(static_cast<Eigen::Index>(*a), -f.exponent);
  }
  return s;
}

struct GreedyFactorization {
  ZetaWord word;
  ExactSeries residual;  // 1 + O(x^{T+1})
};

/// Strips the lowest nonzero coefficient c_d with (1 - x^d)^{c_d} until the
/// residual is 1 to the series' order.
GreedyFactorization greedy_factor(const ExactSeries& s);

struct ExpansionCheck {
  std::string function;
  ZetaWord word;
  Eigen::Index order = 0;
  std::uint64_t claimed_order = 0;
  bool pass = false;
  std::optional<Eigen::Index> first_mismatch_degree;
  std::optional<Rational> first_mismatch_value;
  /// Lowest nonzero residual degree within the computed order, if any.
  std::optional<Eigen::Index> actual_residual_order;
  ExactSeries residual;
};

/// Checks local_series(f) / word == 1 + O(x^{T'}).
ExpansionCheck verify_expansion(const MultiplicativeSpec& f, const ZetaWord& w, std::uint64_t claimed_order,
                                Eigen::Index order = 0, std::uint64_t p = 0);

// ---------------------------------------------------------------------------
// Words for the function families. A "level m" word has its first nontrivial
// scale at n = n(E^m tau); the local series it factors has coefficients
// E^m tau(j) at x^j, i.e. it is the series of E^{m+1} tau.

/// zeta(s) zeta^{k-1}(2s), for E tau_k; residual order 5.
ZetaWord toth_word(std::uint32_t k);
/// zeta(s) zeta(ns) zeta((2n+1)s) zeta(3ns) / (zeta((n+1)s) zeta(2ns)); residual order 3n+1.
ZetaWord tower_word(std::uint32_t level);
/// zeta(s) zeta^{k-1}(ns) / (zeta^{k-1}((n+1)s) zeta^{k(k-1)/2}(2ns)); residual order 2n+1.
ZetaWord tower_word_k(std::uint32_t level, std::uint32_t k);
/// zeta(s) zeta^2(2s) / zeta(3s), for E of the Gaussian divisor function; residual order 5.
ZetaWord gaussian_word();
/// zeta(s) (zeta(ns) / zeta((n+1)s))^e with residual order 2n.
ZetaWord tail_pair_word(const TowerInt& n, long e);

struct GeneralWord {
  ZetaWord word;
  TowerInt n;
  long exponent = 0;
  std::uint32_t m0 = 0;
  /// E^{m+1} f, the function whose series the word factors.
  MultiplicativeSpec series_function;
  /// Tóth-type hypothesis f(p^l) = f(p^{l+1}) = k at l = n for the series
  /// function; generically false (value at p^{n+1} is 1).
  std::optional<bool> toth_hypothesis_holds;
};

/// Word for E^{m+1} f from its lowest support element n = n(E^m f) and
/// e = f(n(f)) - 1; requires m >= m0_bound(f, 2).
GeneralWord general_word(const ArithmeticFunction& f, std::uint32_t m);

struct KnownWord {
  ZetaWord word;
  /// "toth", "gaussian", "tower", "tower_k" or "general".
  std::string family;
};

/// The word for E tau_k, E gauss, E^{m+1} tau_k (m >= 2) or, failing those,
/// the general word for E^{m+1} g; nullopt when none applies.
std::optional<KnownWord> known_word(const MultiplicativeSpec& f);

}  // namespace expdiv
