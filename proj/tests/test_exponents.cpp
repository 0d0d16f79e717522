#include "expdiv/expairs.hpp"
#include "expdiv/exponents.hpp"

#include <doctest.h>

using namespace expdiv;

TEST_CASE("theta_k bounds") {
  CHECK(theta_k_bound(1).value == 0);
  CHECK(theta_k_bound(2).value == Rational(131, 416));
  CHECK(theta_k_bound(2).source == "Huxley 2005");
  CHECK(theta_k_bound(3).value == Rational(43, 96));
  CHECK(theta_k_bound(5).value == Rational(4, 7));
  CHECK(theta_k_bound(5).provenance == Provenance::Formula);
}

TEST_CASE("u_general") {
  CHECK(u_general(3, 2) == Rational(416, 1117));
  CHECK(u_general(3, 2) < Rational(5, 13));
  CHECK(u_general(2, 16) == Rational(1, 17));
  CHECK(u_general(5, 2) == Rational(2, 5));
  CHECK(u_general(5, 2) <= u_bound_simple(5, 2));
  for (std::uint32_t k = 5; k <= 20; ++k)
    for (int l = 2; l <= 10; ++l) {
      CHECK(u_general(k, l) <= u_bound_simple(k, l));
      CHECK(u_bound_simple(k, l) < u_bound_classical(k, l));
    }
  for (std::uint32_t k = 2; k <= 12; ++k)
    for (int l = 2; l < 20; ++l) CHECK(u_general(k, l + 1) < u_general(k, l));
  for (std::uint32_t k = 4; k <= 12; ++k) CHECK(u_general(k + 1, 3) > u_general(k, 3));
}

TEST_CASE("u_general at tower scales") {
  auto e = u_general_tower(2, 2);
  REQUIRE(e.value);
  CHECK(*e.value == Rational(1, 17));
  auto big = u_general_tower(3, 5);
  CHECK_FALSE(big.value);
  CHECK(big.expression.find("2^(2^65536)") != std::string::npos);
  CHECK(big.epsilon);
  CHECK_THROWS_AS(big.exact(), DomainError);
}

TEST_CASE("beta formula") {
  CHECK(beta_nowak(1, 2, 3, Rational(8, 25)) == Rational(17, 52));
  CHECK(beta_nowak(1, 16, 17, Rational(15, 307)) == Rational(73, 1254));
  CHECK(Rational(73, 1254) < Rational(1, 17));
  for (int b = 2; b <= 30; ++b) CHECK(beta_nowak(1, b, b + 1, 0) == Rational(1, b + 2));
  CHECK_THROWS_AS(beta_nowak(1, 2, 7, 0), DomainError);            // c >= 2(a+b)
  CHECK_THROWS_AS(beta_nowak(1, 2, 3, Rational(1, 2)), DomainError);  // theta >= 1/c
  // Increasing in theta on the hypothesis region.
  for (int t = 0; t < 15; ++t) CHECK(beta_nowak(1, 16, 17, Rational(t, 300)) < beta_nowak(1, 16, 17, Rational(t + 1, 300)));
}

TEST_CASE("theta below 1/(n+1) gives beta below 1/(n+1)") {
  const auto& kb = ThetaKnowledgeBase::builtin();
  for (const auto& b : kb.records()) {
    if (b.target.kind != ThetaKind::OneM && b.target.kind != ThetaKind::OneMM) continue;
    Integer n = b.target.param;
    if (b.value >= Rational(1) / Rational(n + 1)) continue;
    CHECK(beta_nowak(1, n, n + 1, b.value) < Rational(1) / Rational(n + 1));
  }
}

TEST_CASE("omega exponents") {
  CHECK(*omega_exponent(OmegaFamily::em_tau(2)).value == Rational(1, 34));
  CHECK(*omega_exponent(OmegaFamily::e_tau_k(2)).value == Rational(1, 3));
  CHECK(*omega_exponent(OmegaFamily::em_tau_k(2, 3)).value == Rational(1, 33));
  CHECK_THROWS_AS(omega_exponent(OmegaFamily::em_tau(1)), DomainError);
  CHECK_THROWS_AS(omega_exponent(OmegaFamily::e_tau_k(1)), DomainError);
}

TEST_CASE("moment exponents") {
  CHECK(moment_exponents(1) == std::pair{Rational(1, 3), Rational(1, 4)});
  CHECK(moment_exponents(2) == std::pair{Rational(5, 13), Rational(5, 18)});
  for (std::uint32_t r = 1; r <= 40; ++r) {
    auto [u, t] = moment_exponents(r);
    CHECK(u < Rational(1, 2));
    CHECK(t < Rational(1, 3));
  }
  CHECK_THROWS_AS(moment_exponents(0), DomainError);
}

TEST_CASE("knowledge base") {
  const auto& kb = ThetaKnowledgeBase::builtin();
  CHECK(kb.version() == 1);
  CHECK(kb.rederive_mismatches().empty());
  auto t16 = kb.find({ThetaKind::OneM, 16});
  REQUIRE(t16);
  CHECK(t16->value == Rational(15, 307));
  CHECK(t16->provenance == Provenance::PairDerived);
  CHECK(theta_second_case(eval_word(ProcessWord::parse(t16->witness)), 16) == t16->value);
  auto t4 = kb.find({ThetaKind::OneM, 4});
  REQUIRE(t4);
  CHECK(t4->value == Rational(1448, 10331));
  CHECK(t4->provenance == Provenance::ExternalReference);
  CHECK_FALSE(t4->witness_verified);
  CHECK(kb.find({ThetaKind::OneMM, 2})->value == Rational(8, 25));
  CHECK(kb.find({ThetaKind::OneMM, 16})->value == Rational(93607, 1698654));
  CHECK_FALSE(kb.find({ThetaKind::OneM, 3}));

  // A tampered pair-derived record is detected.
  auto tampered = ThetaKnowledgeBase::from_json(R"({"version": 2, "records": [
    {"target": {"kind": "one_m", "param": "16"}, "value": "1/20", "provenance": "pair-derived",
     "witness": "A^3 B A^2 B A^4 B I", "witness_verified": true}]})");
  CHECK(tampered.rederive_mismatches().size() == 1);
  CHECK_THROWS_AS(ThetaKnowledgeBase::from_json("{"), DomainError);
  CHECK_THROWS_AS(ThetaKnowledgeBase::from_file("/nonexistent/kb.json"), DomainError);
}

TEST_CASE("reports") {
  auto r = report(2, 2, false);
  CHECK(r.function == "E3tau");
  CHECK(r.scale == TowerInt(16));
  CHECK(*r.error.value == Rational(1, 17));
  CHECK(*r.omega.value == Rational(1, 34));
  CHECK_FALSE(r.error_rh);

  auto rh = report(2, 2, true);
  REQUIRE(rh.error_rh);
  CHECK(*rh.error_rh->value == Rational(73, 1254));
  CHECK(rh.error_rh->rh_conditional);

  auto rh3 = report(2, 3, true);
  REQUIRE(rh3.error_rh);
  Rational th(93607, 1698654);
  CHECK(*rh3.error_rh->value == (1 - th) / (18 - 34 * th));
  CHECK(rh3.error_rh->epsilon);
  CHECK(rh3.secondary_log_degree == 1);

  // Beyond the knowledge base the closed forms supply theta at r = 16.
  auto rh4 = report(3, 2, true);
  REQUIRE(rh4.error_rh);
  Rational t16 = theta_closed(16, PairVariant::TwoD);
  CHECK(*rh4.error_rh->value == beta_nowak(1, 65536, 65537, t16));

  auto big = report(4, 2, false);
  CHECK_FALSE(big.error.value);
  CHECK(big.scale.to_string() == "2^65536");

  auto k5 = report(2, 5, true);
  CHECK_FALSE(k5.error_rh);
  CHECK_FALSE(k5.error_rh_unavailable.empty());
  CHECK_THROWS_AS(report(1, 2, false), DomainError);
}
