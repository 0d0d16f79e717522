#pragma once

// Exponent pairs under the van der Corput A and B processes, acting as 3x3
// matrices on homogeneous coordinates (k : l : 1).

#include "expdiv/numeric.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace expdiv {

template <class Scalar>
using ProjectiveMatrix = Eigen::Matrix<Scalar, 3, 3>;
template <class Scalar>
using ProjectivePoint = Eigen::Matrix<Scalar, 3, 1>;

enum class Process { A, B };

template <class Scalar>
ProjectiveMatrix<Scalar> process_matrix(Process p) {
  ProjectiveMatrix<Scalar> m;
  if (p == Process::A) m << 1, 0, 0, 1, 1, 1, 2, 0, 2;
  else m << 0, 2, -1, 2, 0, 1, 0, 0, 2;
  return m;
}

/// Eigenbasis of the A matrix: A = S diag-form S^{-1}.
template <class Scalar>
ProjectiveMatrix<Scalar> a_eigenbasis() {
  ProjectiveMatrix<Scalar> s;
  s << 0, -1, 0, 1, 0, 1, 0, 2, 1;
  return s;
}

/// A^n = S [[1,n,0],[0,1,0],[0,0,2^n]] S^{-1}.
template <class Scalar>
ProjectiveMatrix<Scalar> a_power(unsigned n) {
  ProjectiveMatrix<Scalar> j = ProjectiveMatrix<Scalar>::Zero();
  j(0, 0) = 1;
  j(0, 1) = Scalar(n);
  j(1, 1) = 1;
  Scalar two_n = 1;
  for (unsigned i = 0; i < n; ++i) two_n *= 2;
  j(2, 2) = two_n;
  const ProjectiveMatrix<Scalar> s = a_eigenbasis<Scalar>();
  return s * j * s.inverse();
}

struct ExponentPair {
  Rational k;
  Rational l;
  /// Holds up to +epsilon in both coordinates.
  bool epsilon = false;

  ProjectivePoint<Rational> homogeneous() const { return {k, l, Rational(1)}; }
  static ExponentPair from_homogeneous(const ProjectivePoint<Rational>& v, bool epsilon);
  /// 0 <= k <= 1/2 <= l <= 1.
  bool in_region() const;

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
};

ExponentPair apply_process(Process step, const ExponentPair& pair);

struct Seed {
  std::string id;  // "I", "H05", "H87" or "(k,l)"
  ExponentPair pair;

  static Seed identity();
  static Seed h05();
  static Seed h87();
  static Seed explicit_pair(const Rational& k, const Rational& l);
  /// Named seeds only.
  static Seed named(const std::string& id);
};

/// Processes listed as written; applied right to left onto the seed.
struct ProcessWord {
  std::vector<Process> steps;
  Seed seed = Seed::identity();

  /// Grammar: items A, B, (group), each optionally ^n, then a seed I, H05,
  /// H87 or (k,l). Whitespace is ignored; the seed defaults to I.
  static ProcessWord parse(const std::string& text);
  /// Run-length form, e.g. "A^3 B A^2 B A^4 B I".
  std::string to_string() const;
  std::string steps_string() const;
};

ExponentPair eval_word(const ProcessWord& w);

enum class PairVariant { TwoD, ThreeD };

/// Closed forms: r >= 5 (2d, word A^{r-1} B A^{r-3} BAB) and
/// r >= 10 (3d, word A^{r-1} B A^{r-2} BABA^2 B).
ExponentPair closed_form_pair(int r, PairVariant v);
ProcessWord closed_form_word(int r, PairVariant v);

/// 2l - 2mk - 1; the second-case formula applies when this is <= 0.
Rational second_case_condition(const ExponentPair& pair, const Rational& m);

class FirstCaseRegime : public DomainError {
public:
  FirstCaseRegime(const Rational& condition, const Rational& m);
  const Rational& condition() const { return condition_; }

private:
  Rational condition_;
};

/// theta(1, m) = k / (mk - l + 1); throws FirstCaseRegime when the condition fails.
Rational theta_second_case(const ExponentPair& pair, const Rational& m);

/// Closed form for theta(1, 2^r) (2d, r >= 5) or theta(1, 2^r, 2^r) (3d, r >= 10).
Rational theta_closed(int r, PairVariant v);

// ---------------------------------------------------------------------------
// Search

/// Maps a pair to an objective value; nullopt marks an infeasible pair.
struct Objective {
  std::string name;
  std::function<std::optional<Rational>(const ExponentPair&)> value;
};

Objective theta_one_m_objective(const Rational& m);

struct Candidate {
  ProcessWord word;
  ExponentPair pair;
  std::optional<Rational> value;
};

struct SearchOptions {
  std::vector<Seed> seeds{Seed::identity()};
  std::size_t max_len = 12;
  /// Beam width per word length; ignored when exhaustive.
  std::size_t beam_width = 512;
  bool exhaustive = false;
  unsigned threads = 1;
};

inline constexpr std::size_t kMaxExhaustiveLength = 24;

struct SearchResult {
  std::string objective;
  std::optional<Candidate> best;
  /// Feasible candidates not dominated in (k, l).
  std::vector<Candidate> pareto;
  std::size_t evaluated = 0;
  std::string diagnostic;
};

/// Words without BB, lengths 0..max_len, prefixed one step at a time.
/// Ties break by shorter word, then by rendered word.
SearchResult search_word(const Objective& objective, const SearchOptions& options);

}  // namespace expdiv
