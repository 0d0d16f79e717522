#pragma once

// Theta bounds for divisor problems and the asymptotic exponents composed
// from them.

#include "expdiv/numeric.hpp"
#include "expdiv/tower.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace expdiv {

enum class ThetaKind {
  Dim,    // theta_k: Delta_k(x) << x^{theta_k + eps}
  OneM,   // theta(1, m)
  OneMM,  // theta(1, m, m)
};

struct ThetaTarget {
  ThetaKind kind = ThetaKind::Dim;
  Integer param;  // k for Dim, m otherwise
  friend bool operator==(const ThetaTarget&, const ThetaTarget&) = default;
  std::string to_string() const;
};

enum class Provenance { Literature, PairDerived, Formula, ExternalReference };
std::string to_string(Provenance p);

struct ThetaBound {
  ThetaBound() = default;
  ThetaBound(ThetaTarget t, Rational v) : target(std::move(t)), value(std::move(v)) {}

  ThetaTarget target;
  Rational value;
  bool epsilon = false;
  bool rh_conditional = false;
  Provenance provenance = Provenance::Literature;
  std::string source;
  /// Exponent-pair word, when one is recorded.
  std::string witness;
  bool witness_verified = false;
  std::string note;
};

/// Immutable after construction.
class ThetaKnowledgeBase {
public:
  /// The data file compiled into the library.
  static const ThetaKnowledgeBase& builtin();
  static ThetaKnowledgeBase from_json(const std::string& text);
  static ThetaKnowledgeBase from_file(const std::string& path);

  const std::vector<ThetaBound>& records() const { return records_; }
  int version() const { return version_; }
  std::optional<ThetaBound> find(const ThetaTarget& t) const;

  /// Records whose witness word, re-evaluated, disagrees with the stored
  /// value (pair-derived, witness_verified records only).
  std::vector<std::string> rederive_mismatches() const;

private:
  int version_ = 0;
  std::vector<ThetaBound> records_;
};

/// Best listed theta_k; theta_1 = 0.
ThetaBound theta_k_bound(std::uint32_t k, const ThetaKnowledgeBase& kb = ThetaKnowledgeBase::builtin());

/// Exact exponent, or a symbolic rendering when a tower scale is too large.
struct ExponentValue {
  std::optional<Rational> value;
  std::string expression;
  bool epsilon = false;
  bool rh_conditional = false;
  std::vector<std::string> provenance;

  const Rational& exact() const;
};

/// u_{k,l} = 1 / (l + 1 - theta_{k-1}).
Rational u_general(std::uint32_t k, const Integer& l, const ThetaKnowledgeBase& kb = ThetaKnowledgeBase::builtin());
/// u_general at the tower scale l = n(E^m tau); symbolic above 2^64.
ExponentValue u_general_tower(std::uint32_t k, std::uint32_t m,
                              const ThetaKnowledgeBase& kb = ThetaKnowledgeBase::builtin());

/// Upper bounds u_{k,l} <= (k+1)/(3+(k+1)l) < (2k-1)/(3+(2k-1)l).
Rational u_bound_simple(std::uint32_t k, const Integer& l);
Rational u_bound_classical(std::uint32_t k, const Integer& l);

/// (1 - a theta) / (a + c - 2ac theta), for Dirichlet series
/// zeta(as) zeta^r(bs) / zeta^k(cs); conditional on RH. Requires
/// a <= b < c < 2(a+b) and theta < 1/c.
Rational beta_nowak(const Integer& a, const Integer& b, const Integer& c, const Rational& theta);

struct OmegaFamily {
  enum class Kind { EmTau, ETauK, EmTauK } kind;
  std::uint32_t m = 0;
  std::uint32_t k = 2;

  static OmegaFamily em_tau(std::uint32_t m) { return {Kind::EmTau, m, 2}; }
  static OmegaFamily e_tau_k(std::uint32_t k) { return {Kind::ETauK, 1, k}; }
  static OmegaFamily em_tau_k(std::uint32_t m, std::uint32_t k) { return {Kind::EmTauK, m, k}; }
};

ExponentValue omega_exponent(const OmegaFamily& family);

/// (u_r, t_r) = ((2^r+1)/(2^{r+1}+5), (2^r+1)/(3(2^r+2))).
std::pair<Rational, Rational> moment_exponents(std::uint32_t r);

struct ExponentReport {
  std::uint32_t m = 0;
  std::uint32_t k = 0;
  bool rh = false;
  /// E^{m+1} tau_k: the function whose Dirichlet series has its second pole at
  /// s = 1/n with n = n(E^m tau).
  std::string function;
  TowerInt scale;
  std::string main_term;
  std::uint32_t secondary_log_degree = 0;
  ExponentValue error;
  std::optional<ExponentValue> error_rh;
  std::string error_rh_unavailable;
  ExponentValue omega;
  std::vector<ThetaBound> inputs;
};

/// Exponents for level m >= 2 and k >= 2.
ExponentReport report(std::uint32_t m, std::uint32_t k, bool rh,
                      const ThetaKnowledgeBase& kb = ThetaKnowledgeBase::builtin());

}  // namespace expdiv
