// Acceptance checks: one PASS/FAIL line per criterion, details indented below.

#include "expdiv/bell.hpp"
#include "expdiv/eop.hpp"
#include "expdiv/expairs.hpp"
#include "expdiv/exponents.hpp"
#include "expdiv/sums.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace expdiv;

namespace {

// Tolerances and time limits.
constexpr double kSeriesSeconds = 1.0;
constexpr double kClosedFormSeconds = 1.0;
constexpr double kSearchSeconds = 60.0;
constexpr double kSupportSeconds = 5.0;
constexpr double kSumsSeconds = 180.0;
constexpr long double kMeanTolerance = 2e-3L;    // |sum/x - C_f| for tau^(e) at 10^7
constexpr long double kTwoWayTolerance = 1e-6L;  // C_f by the word vs the direct product
constexpr long double kDeltaEnvelope = 50.0L;    // |Delta(x)| for E^3 tau at 10^7
constexpr std::uint64_t kSumX = 10'000'000;
constexpr int kRandomPairs = 100;
constexpr int kLawCases = 1000;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail << "    " << (cond ? "ok   " : "FAIL ") << what << "\n";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(long double v, int digits = 10) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

MultiplicativeSpec e_tau(std::uint32_t m, std::uint32_t k = 2) {
  return MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::tau_k(k)), m);
}

void timed_expansion(Check& c, const std::string& label, const MultiplicativeSpec& f, const ZetaWord& w,
                     std::uint64_t order, std::uint64_t p = 0) {
  auto t0 = std::chrono::steady_clock::now();
  auto r = verify_expansion(f, w, order, 0, p);
  double s = seconds_since(t0);
  c.expect(r.pass && s < kSeriesSeconds, label + ": " + f.name() + " / " + w.to_string() + " to order " +
                                             std::to_string(order) + " (" + fmt(s, 3) + " s)");
}

Check criterion1() {
  Check c;
  for (std::uint32_t k = 2; k <= 5; ++k) timed_expansion(c, "(a) toth k=" + std::to_string(k), e_tau(1, k), toth_word(k), 5);
  timed_expansion(c, "(b) tower m=2", e_tau(3), tower_word(2), 49);
  for (std::uint32_t k : {3u, 4u}) timed_expansion(c, "(c) tower k=" + std::to_string(k), e_tau(3, k), tower_word_k(2, k), 33);
  auto eg = MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::gauss_tau()), 1);
  timed_expansion(c, "(d) gaussian", eg, gaussian_word(), 5);
  auto t0 = std::chrono::steady_clock::now();
  auto g = general_word(ArithmeticFunction(MultiplicativeSpec::tau_k(3)), 2);
  auto r = verify_expansion(g.series_function, g.word, 32);
  double s = seconds_since(t0);
  c.expect(r.pass && s < kSeriesSeconds,
           "(e) general word tau3, m=2: " + g.word.to_string() + " below degree 32 (" + fmt(s, 3) + " s)");
  return c;
}

Check criterion2() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  bool two_d = true, three_d = true;
  for (int r = 5; r <= 12; ++r) {
    auto p = closed_form_pair(r, PairVariant::TwoD);
    Rational m(pow2(static_cast<std::uint64_t>(r)));
    two_d = two_d && p == eval_word(closed_form_word(r, PairVariant::TwoD)) &&
            theta_closed(r, PairVariant::TwoD) == theta_second_case(p, m) &&
            theta_closed(r, PairVariant::TwoD) < Rational(1) / (m + r);
  }
  for (int r = 10; r <= 14; ++r) {
    Rational m(pow2(static_cast<std::uint64_t>(r)));
    three_d = three_d && closed_form_pair(r, PairVariant::ThreeD) == eval_word(closed_form_word(r, PairVariant::ThreeD)) &&
              theta_closed(r, PairVariant::ThreeD) < Rational(1) / (m + 1);
  }
  double s = seconds_since(t0);
  c.expect(two_d, "2-D closed forms r = 5..12: pair, theta and bound");
  c.expect(three_d, "3-D closed forms r = 10..14: pair and bound");
  c.expect(s < kClosedFormSeconds, "runtime " + fmt(s, 3) + " s");
  return c;
}

Check criterion3() {
  Check c;
  auto p = eval_word(ProcessWord::parse("A^3 B A^2 B A^4 B I"));
  c.expect(theta_second_case(p, 16) == Rational(15, 307), "theta(1,16) = 15/307 from A^3 B A^2 B A^4 B I");
  c.expect(second_case_condition(p, 16) == 0, "condition 2l - 32k - 1 = 0");
  SearchOptions o;
  o.max_len = 9;
  o.exhaustive = true;
  auto t0 = std::chrono::steady_clock::now();
  auto r = search_word(theta_one_m_objective(16), o);
  double s = seconds_since(t0);
  bool found = r.best && *r.best->value <= Rational(15, 307);
  c.expect(found, "exhaustive search, max_len 9, attains <= 15/307: best " +
                      (r.best ? to_string(*r.best->value) + " via " + r.best->word.to_string() : std::string("none")) +
                      " (" + std::to_string(r.evaluated) + " words)");
  c.expect(s < kSearchSeconds, "search runtime " + fmt(s, 3) + " s");
  // The witness word has 12 steps; report where the optimum first appears.
  o.max_len = 12;
  auto r12 = search_word(theta_one_m_objective(16), o);
  c.detail << "    info max_len 12: " << (r12.best ? to_string(*r12.best->value) + " via " + r12.best->word.to_string() : "none")
           << "\n";
  return c;
}

Check criterion4() {
  Check c;
  c.expect(u_general(3, 2) == Rational(416, 1117) && u_general(3, 2) < Rational(5, 13), "u(3,2) = 416/1117 < 5/13");
  bool chain = true;
  for (std::uint32_t k = 5; k <= 20; ++k)
    for (int l = 2; l <= 10; ++l)
      chain = chain && u_general(k, l) <= u_bound_simple(k, l) && u_bound_simple(k, l) < u_bound_classical(k, l);
  c.expect(chain, "u(k,l) <= (k+1)/(3+(k+1)l) < (2k-1)/(3+(2k-1)l) for k = 5..20, l = 2..10");
  c.expect(beta_nowak(1, 2, 3, Rational(8, 25)) == Rational(17, 52), "beta(1,2,3; 8/25) = 17/52");
  Rational b = beta_nowak(1, 16, 17, Rational(15, 307));
  c.expect(b == Rational(73, 1254) && b < Rational(1, 17), "beta(1,16,17; 15/307) = 73/1254 < 1/17");
  c.expect(*omega_exponent(OmegaFamily::em_tau(2)).value == Rational(1, 34), "omega E^m tau, m = 2: 1/34");
  c.expect(*omega_exponent(OmegaFamily::e_tau_k(2)).value == Rational(1, 3), "omega E tau_k, k = 2: 1/3");
  c.expect(*omega_exponent(OmegaFamily::em_tau_k(2, 3)).value == Rational(1, 33), "omega E^m tau_k, (2,3): 1/33");
  c.expect(moment_exponents(1) == std::pair{Rational(1, 3), Rational(1, 4)}, "moment exponents r = 1: (1/3, 1/4)");
  return c;
}

Check criterion5() {
  Check c;
  ArithmeticFunction tau(MultiplicativeSpec::tau());
  auto t0 = std::chrono::steady_clock::now();
  c.expect(support_scan(tau, 1, 13).elements == std::vector<std::uint64_t>{4, 8, 9, 12}, "A_1 up to 13 = [4, 8, 9, 12]");
  c.expect(support_scan(tau, 2, 100).elements == std::vector<std::uint64_t>{16, 48, 80, 81},
           "A_2 up to 100 = [16, 48, 80, 81]");
  auto v = verify_min_elements(2, 100);
  c.expect(v.status == MinElementsCheck::Status::Pass && v.first_other == 81u && v.other_lower_bound == Integer(81),
           "verify_min_elements(2, 100): " + to_string(v.status) + ", first other 81 = min{3^4, 2^8}");
  double s = seconds_since(t0);
  c.expect(s < kSupportSeconds, "runtime " + fmt(s, 3) + " s");
  return c;
}

Check criterion6() {
  Check c;
  std::mt19937_64 rng(6);
  int involution = 0;
  for (int i = 0; i < kRandomPairs; ++i) {
    ExponentPair p{Rational(long(rng() % 1000), 1 + long(rng() % 999)), Rational(long(rng() % 1000), 1 + long(rng() % 999)),
                   false};
    involution += apply_process(Process::B, apply_process(Process::B, p)) == p;
  }
  c.expect(involution == kRandomPairs, "B^2 = identity on " + std::to_string(kRandomPairs) + " random rational pairs");
  auto a = process_matrix<Rational>(Process::A);
  ProjectiveMatrix<Rational> acc = ProjectiveMatrix<Rational>::Identity();
  bool powers = true;
  for (unsigned n = 0; n <= 20; ++n) {
    powers = powers && a_power<Rational>(n) == acc;
    acc = a * acc;
  }
  c.expect(powers, "A^n = S J^n S^{-1} equals the iterated product, n <= 20");
  return c;
}

Check criterion7() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();

  // tau^(e): mean value against the constant computed two ways.
  auto f1 = e_tau(1);
  auto ec = euler_constants<long double>(f1, toth_word(2), 10);
  auto s1 = checkpoint_sums(f1, {kSumX});
  long double mean = s1.sums[0].convert_to<long double>() / kSumX;
  bool two_way = ec.c_f && std::fabs(ec.mean_a.value - ec.c_f->value) <= kTwoWayTolerance;
  c.expect(two_way, "tau^(e): C_f by zeta word " + fmt(ec.mean_a.value) + " vs direct product " +
                        (ec.c_f ? fmt(ec.c_f->value) : std::string("n/a")));
  c.expect(ec.c_f && std::fabs(mean - ec.c_f->value) <= kMeanTolerance,
           "tau^(e): sum/x at 10^7 = " + fmt(mean) + ", |sum/x - C_f| = " +
               fmt(ec.c_f ? std::fabs(mean - ec.c_f->value) : -1, 4));

  // E^3 tau, secondary term x^{1/16}.
  auto f3 = e_tau(3);
  auto word3 = tower_word(2);
  auto ec3 = euler_constants<long double>(f3, word3, 10);
  auto b3 = secondary_constant_level<long double>(2, 8);
  auto s3 = checkpoint_sums(f3, geometric_checkpoints(1000, kSumX, 2));
  auto fit3 = fit_error_exponent(s3, {.mean_a = ec3.mean_a.value, .mean_b = b3.value, .scale = 16, .fit_log_degree = {}},
                                 "1/17");
  c.expect(fit3.max_abs_delta <= kDeltaEnvelope,
           "E3tau: max |sum - A x - B x^(1/16)| over x <= 10^7 = " + fmt(fit3.max_abs_delta, 4) + " (A = " +
               fmt(ec3.mean_a.value) + ", B = " + fmt(b3.value, 8) + ")");
  c.detail << "    info E3tau fitted slope " << (fit3.slope ? fmt(*fit3.slope, 4) : "n/a")
           << ", predicted exponent 1/17 (not certifiable at this scale)\n";

  // E^2 tau, secondary term x^{1/4} from the greedy word.
  auto f2 = e_tau(2);
  auto word2 = greedy_word(f2, 16);
  auto ec2 = euler_constants<long double>(f2, word2, 10);
  auto b2 = secondary_constant_level<long double>(1, 8, true);
  auto s2 = checkpoint_sums(f2, geometric_checkpoints(1000, kSumX, 2));
  auto fit2 = fit_error_exponent(s2, {.mean_a = ec2.mean_a.value, .mean_b = b2.value, .scale = 4, .fit_log_degree = {}});
  c.expect(fit2.max_abs_delta <= kDeltaEnvelope,
           "E2tau: max |sum - A x - B x^(1/4)| over x <= 10^7 = " + fmt(fit2.max_abs_delta, 4) + " (word " +
               word2.to_string() + ")");
  c.detail << "    info E2tau fitted slope " << (fit2.slope ? fmt(*fit2.slope, 4) : "n/a") << "\n";

  double s = seconds_since(t0);
  c.expect(s < kSumsSeconds, "runtime " + fmt(s, 4) + " s");
  return c;
}

Check criterion8() {
  Check c;
  std::mt19937_64 rng(8);
  const std::uint64_t x_max = 1'000'000;
  for (const auto& f : {e_tau(1), e_tau(2), e_tau(3, 3),
                        MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::gauss_tau()), 1)}) {
    auto v = sieve_values(f, x_max);
    ArithmeticFunction base = std::get<rule::EPower>(f.rule()).base ? *std::get<rule::EPower>(f.rule()).base
                                                                     : ArithmeticFunction(MultiplicativeSpec::one());
    std::uint32_t m = std::get<rule::EPower>(f.rule()).m;
    int bad = 0;
    for (int i = 0; i < 10'000; ++i) {
      std::uint64_t n = 1 + rng() % x_max;
      bad += Integer(v[n]) != e_power_eval(base, m, n);
    }
    c.expect(bad == 0, "sieve vs recursive evaluation, " + f.name() + ", 10^4 random n <= 10^6");
  }

  // Gaussian divisors d = g (a + bi), a >= 1, b >= 0, gcd(a, b) = 1, divide n iff g (a^2 + b^2) | n.
  const int limit = 10'000;
  std::vector<int> count(limit + 1, 0);
  for (int a = 1; a * a <= limit; ++a)
    for (int b = 0; a * a + b * b <= limit; ++b) {
      if (std::gcd(a, b) != 1) continue;
      int norm = a * a + b * b;
      for (int g = 1; g * norm <= limit; ++g)
        for (int n = g * norm; n <= limit; n += g * norm) ++count[n];
    }
  int bad = 0;
  for (int n = 1; n <= limit; ++n) bad += gauss_tau(n) != count[n];
  c.expect(bad == 0, "gauss_tau vs Gaussian divisor enumeration, n <= 10^4");

  ValueTable one(std::vector<Integer>(limit, Integer(1)));
  ValueTable acc = one;
  bad = 0;
  for (std::uint32_t k = 2; k <= 5; ++k) {
    acc = dirichlet_convolve(acc, one);
    for (int n = 1; n <= limit; ++n) bad += tau_k(k, n) != acc(n);
  }
  c.expect(bad == 0, "tau_k vs iterated Dirichlet convolution, n <= 10^4, k <= 5");
  return c;
}

Check criterion9() {
  Check c;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> value(-5, 20);
  auto table = [&](std::size_t n) {
    std::vector<Integer> v(n);
    for (auto& x : v) x = value(rng);
    return ValueTable(std::move(v));
  };
  const std::uint64_t primes[] = {2, 3, 5, 7, 101, 65537};
  int add = 0, mul = 0, conv = 0, trip = 0, fixed = 0;
  for (int i = 0; i < kLawCases; ++i) {
    ValueTable f = table(30), g = table(30);
    auto ef = apply_E(ArithmeticFunction(f)), eg = apply_E(ArithmeticFunction(g));
    auto esum = apply_E(ArithmeticFunction(f + g));
    auto eprod = apply_E(ArithmeticFunction(f * g));
    auto econv = apply_E(ArithmeticFunction(dirichlet_convolve(f, g)));
    auto conv_fg = exp_convolve(ef, eg);
    std::uint64_t p = primes[rng() % std::size(primes)];
    bool a_ok = true, m_ok = true, c_ok = true;
    for (std::uint32_t a = 1; a <= 30; ++a) {
      a_ok = a_ok && esum.at_prime_power(p, a) == ef.at_prime_power(p, a) + eg.at_prime_power(p, a);
      m_ok = m_ok && eprod.at_prime_power(p, a) == ef.at_prime_power(p, a) * eg.at_prime_power(p, a);
      c_ok = c_ok && econv.at_prime_power(p, a) == conv_fg.at_prime_power(p, a);
    }
    add += a_ok;
    mul += m_ok;
    conv += c_ok;
    ValueTable h = table(50);
    trip += apply_E_inverse(apply_E(ArithmeticFunction(h)), 50) == h;

    std::size_t n0 = 2 + rng() % 30;
    std::vector<Integer> w(40, Integer(1));
    w[n0 - 1] = 2 + static_cast<int>(rng() % 7);
    ArithmeticFunction fw(ValueTable(std::move(w)));
    TowerInt t = tower_min(fw, 1);
    fixed += min_support(fw) == n0 && t == TowerInt::pow2(TowerInt(n0)) && t != TowerInt(n0);
  }
  bool one_fixed = apply_E(ArithmeticFunction(MultiplicativeSpec::one())).at_prime_power(2, 17) == 1;
  auto n = std::to_string(kLawCases);
  c.expect(add == kLawCases, "E(f+g) = Ef + Eg, " + std::to_string(add) + "/" + n);
  c.expect(mul == kLawCases, "E(fg) = Ef Eg, " + std::to_string(mul) + "/" + n);
  c.expect(conv == kLawCases, "E(f*g) = Ef *e Eg, " + std::to_string(conv) + "/" + n);
  c.expect(trip == kLawCases, "E^{-1} E f = f, " + std::to_string(trip) + "/" + n);
  c.expect(fixed == kLawCases && one_fixed, "fixed point: n(Ef) = 2^{n(f)} != n(f), E(one) = one, " +
                                                std::to_string(fixed) + "/" + n);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"Bell-series identities", criterion1},  {"exponent-pair closed forms", criterion2},
      {"theta(1,16) reproduction", criterion3},    {"exponent formulas", criterion4},
      {"support scans", criterion5},           {"matrix calculus", criterion6},
      {"empirical sums", criterion7},          {"oracle equivalence", criterion8},
      {"E-algebra property suite", criterion9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "    exception: " << e.what() << "\n";
    }
    std::cout << "criterion " << i + 1 << ": " << (c.ok ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << fmt(seconds_since(t0), 3) << " s)\n"
              << c.detail.str();
    failures += !c.ok;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed\n" : "all criteria passed\n");
  return failures ? 1 : 0;
}
