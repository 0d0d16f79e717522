#include "expdiv/bell.hpp"
#include "expdiv/eop.hpp"

#include <doctest.h>

#include <random>

using namespace expdiv;

namespace {

std::vector<Rational> coeffs(const ExactSeries& s) {
  std::vector<Rational> v;
  for (Eigen::Index i = 0; i <= s.order(); ++i) v.push_back(s[i]);
  return v;
}

std::vector<Rational> ints(std::initializer_list<int> xs) {
  std::vector<Rational> v;
  for (int x : xs) v.emplace_back(x);
  return v;
}

MultiplicativeSpec e_tau(std::uint32_t m, std::uint32_t k = 2) {
  return MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::tau_k(k)), m);
}

}  // namespace

TEST_CASE("local series") {
  CHECK(coeffs(local_series(e_tau(1), 6)) == ints({1, 1, 2, 2, 3, 2, 4}));
  CHECK(coeffs(local_series(MultiplicativeSpec::one(), 3)) == ints({1, 1, 1, 1}));
  auto eg = apply_E(ArithmeticFunction(MultiplicativeSpec::gauss_tau()));
  CHECK(coeffs(local_series(eg, 4)) == ints({1, 1, 3, 2, 5}));
  for (std::uint64_t p : {2, 3, 5, 13}) CHECK(coeffs(local_series(eg, 4, p)) == ints({1, 1, 3, 2, 5}));
  CHECK(coeffs(local_series(MultiplicativeSpec::gauss_tau(), 2, 2)) == ints({1, 3, 5}));
  CHECK(coeffs(local_series(MultiplicativeSpec::gauss_tau(), 2, 3)) == ints({1, 2, 3}));
  CHECK(coeffs(local_series(MultiplicativeSpec::gauss_tau(), 2, 5)) == ints({1, 4, 9}));
  CHECK_THROWS_AS(local_series(MultiplicativeSpec::gauss_tau(), 4), DomainError);
}

TEST_CASE("word local factors") {
  CHECK(coeffs(word_local_factor(ZetaWord::parse("1:1"), 3)) == ints({1, 1, 1, 1}));
  CHECK(coeffs(word_local_factor(ZetaWord::parse("1:1,2:1"), 4)) == ints({1, 1, 2, 2, 3}));
  CHECK(coeffs(word_local_factor(gaussian_word(), 4)) == ints({1, 1, 3, 2, 5}));
  // Scales beyond the order are no-ops.
  CHECK(coeffs(word_local_factor(ZetaWord::parse("1:1,100:3"), 3)) == ints({1, 1, 1, 1}));
}

TEST_CASE("word parsing and rendering") {
  ZetaWord w = ZetaWord::parse("17:-1, 1:1,16:1");
  CHECK(w.to_string() == "1:1,16:1,17:-1");
  CHECK(w.exponent_at(TowerInt(16)) == 1);
  CHECK(w.exponent_at(TowerInt(5)) == 0);
  CHECK(ZetaWord::parse("2:1,2:1").exponent_at(TowerInt(2)) == 2);
  CHECK(ZetaWord::parse("2:1,2:-1").factors().size() == 0);
  CHECK_THROWS_AS(ZetaWord::parse("a:1"), DomainError);
  CHECK_THROWS_AS(ZetaWord::parse("0:1"), DomainError);
}

TEST_CASE("greedy factorization") {
  auto g = greedy_factor(local_series(e_tau(1), 4));
  CHECK(g.word == ZetaWord::parse("1:1,2:1"));
  g = greedy_factor(local_series(e_tau(3), 48));
  CHECK(g.word == ZetaWord::parse("1:1,16:1,17:-1,32:-1,33:1,48:1"));
  CHECK(g.residual == ExactSeries(48));
  g = greedy_factor(local_series(MultiplicativeSpec::one(), 20));
  CHECK(g.word == ZetaWord::parse("1:1"));
  CHECK(g.residual == ExactSeries(20));
}

TEST_CASE("greedy factorization inverts word expansion") {
  std::mt19937_64 rng(99);
  for (int c = 0; c < 300; ++c) {
    std::vector<ZetaFactor> fs;
    for (int a = 1; a <= 24; ++a)
      if (rng() % 4 == 0) fs.push_back({TowerInt(std::uint64_t(a)), long(rng() % 7) - 3});
    ZetaWord w(fs);
    auto g = greedy_factor(word_local_factor(w, 24));
    CHECK(g.word == w);
  }
}

TEST_CASE("series arithmetic") {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 200; ++c) {
    ExactSeries a(12), b(12);
    for (Eigen::Index i = 1; i <= 12; ++i) {
      a[i] = Rational(long(rng() % 11) - 5, 1 + long(rng() % 4));
      b[i] = Rational(long(rng() % 11) - 5, 1 + long(rng() % 4));
    }
    CHECK((a * b) / b == a);
    CHECK((a / b) * b == a);
  }
  ExactSeries zero_constant(3);
  zero_constant[0] = 0;
  CHECK_THROWS_AS(ExactSeries(3) / zero_constant, DomainError);
}

TEST_CASE("expansions at their claimed residual orders") {
  for (std::uint32_t k = 2; k <= 5; ++k) {
    auto c = verify_expansion(e_tau(1, k), toth_word(k), 5);
    CHECK_MESSAGE(c.pass, "toth k = " << k);
  }
  auto tw = tower_word(2);
  CHECK(tw.claimed_order() == 49u);
  auto c = verify_expansion(e_tau(3), tw, 49);
  CHECK(c.pass);
  CHECK(c.actual_residual_order == 49);
  for (std::uint32_t k : {3u, 4u}) {
    auto w = tower_word_k(2, k);
    CHECK(w.claimed_order() == 33u);
    CHECK(verify_expansion(e_tau(3, k), w, 33).pass);
  }
  CHECK(tower_word_k(2, 3) == ZetaWord::parse("1:1,16:2,17:-2,32:-3"));
  auto eg = apply_E(ArithmeticFunction(MultiplicativeSpec::gauss_tau()));
  CHECK(verify_expansion(eg, gaussian_word(), 5).pass);
  for (std::uint64_t p : {2, 3, 5, 13}) CHECK(verify_expansion(eg, gaussian_word(), 5, 0, p).pass);
}

TEST_CASE("a failing expansion reports its first mismatch") {
  auto c = verify_expansion(e_tau(1), ZetaWord::parse("1:1"), 3);
  CHECK_FALSE(c.pass);
  CHECK(c.first_mismatch_degree == 2);
  CHECK(c.first_mismatch_value == Rational(1));
}

TEST_CASE("general word") {
  auto g = general_word(ArithmeticFunction(MultiplicativeSpec::tau_k(3)), 2);
  CHECK(g.word == ZetaWord::parse("1:1,16:2,17:-2"));
  CHECK(g.word.claimed_order() == 32u);
  CHECK(g.n == TowerInt(16));
  CHECK(g.exponent == 2);
  CHECK(verify_expansion(g.series_function, g.word, 32).pass);
  CHECK(g.toth_hypothesis_holds == false);

  auto t = general_word(ArithmeticFunction(MultiplicativeSpec::tau()), 2);
  CHECK(t.word == ZetaWord::parse("1:1,16:1,17:-1"));
  CHECK(verify_expansion(t.series_function, t.word, 32).pass);

  CHECK(tail_pair_word(TowerInt(4), 1) == ZetaWord::parse("1:1,4:1,5:-1"));
  CHECK_THROWS_AS(general_word(ArithmeticFunction(MultiplicativeSpec::tau()), 1), DomainError);
}

TEST_CASE("known words") {
  CHECK(known_word(e_tau(1, 4))->family == "toth");
  CHECK(known_word(e_tau(3))->family == "tower");
  CHECK(known_word(e_tau(3, 3))->family == "tower_k");
  CHECK(known_word(apply_E(ArithmeticFunction(MultiplicativeSpec::gauss_tau())))->family == "gaussian");
  CHECK_FALSE(known_word(e_tau(2)));
  CHECK_FALSE(known_word(MultiplicativeSpec::tau()));
}

TEST_CASE("the level-one tower series") {
  // E^2 tau has its first non-trivial scale at 4 and is not covered by the
  // tower words; the greedy factorization still certifies a residual order.
  auto g = greedy_factor(local_series(e_tau(2), 16));
  CHECK(g.word.exponent_at(TowerInt(4)) == 1);
  CHECK(g.word.exponent_at(TowerInt(5)) == -1);
}
