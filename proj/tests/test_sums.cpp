#include "expdiv/eop.hpp"
#include "expdiv/sums.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace expdiv;

namespace {

MultiplicativeSpec e_tau(std::uint32_t m, std::uint32_t k = 2) {
  return MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::tau_k(k)), m);
}

MultiplicativeSpec e_gauss() {
  return MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::gauss_tau()), 1);
}

Integer brute_sum(const MultiplicativeSpec& f, std::uint64_t x) {
  Integer s = 0;
  for (std::uint64_t n = 1; n <= x; ++n) s += f(n);
  return s;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("expdiv_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("sieved values") {
  auto v = sieve_values(e_tau(1), 10);
  CHECK(std::vector<std::int64_t>(v.begin() + 1, v.end()) == std::vector<std::int64_t>{1, 1, 1, 2, 1, 1, 1, 2, 2, 1});
  auto e2 = sieve_values(e_tau(2), 16);
  CHECK(e2[16] == 2);
  CHECK(e2[15] == 1);
  auto one = sieve_values(MultiplicativeSpec::one(), 1000);
  CHECK(std::all_of(one.begin() + 1, one.end(), [](auto x) { return x == 1; }));
}

TEST_CASE("sieve against direct evaluation on random points") {
  std::mt19937_64 rng(2024);
  const std::uint64_t x_max = 1'000'000;
  for (const auto& f : {e_tau(1), e_tau(2), e_tau(3, 3), e_gauss(), MultiplicativeSpec::tau_k(4),
                        MultiplicativeSpec::gauss_tau()}) {
    auto v = sieve_values(f, x_max);
    EPowerEvaluator direct{ArithmeticFunction(MultiplicativeSpec::one())};
    int mismatches = 0;
    for (int i = 0; i < 10'000; ++i) {
      std::uint64_t n = 1 + rng() % x_max;
      if (Integer(v[n]) != f(n)) ++mismatches;
    }
    CHECK_MESSAGE(mismatches == 0, f.name());
  }
  ArithmeticFunction tau(MultiplicativeSpec::tau());
  auto v = sieve_values(e_tau(2), 100'000);
  for (int i = 0; i < 10'000; ++i) {
    std::uint64_t n = 1 + rng() % 100'000;
    CHECK(Integer(v[n]) == e_power_eval(tau, 2, n));
  }
}

TEST_CASE("sieve limits") {
  CHECK_THROWS_AS(sieve_values(e_tau(1), 1'000'000, 1024), DomainError);
  CHECK_THROWS_AS(sieve_values(e_tau(1), kMaxSumBound + 1), DomainError);
}

TEST_CASE("geometric checkpoints") {
  auto c = geometric_checkpoints();
  CHECK(c == std::vector<std::uint64_t>{1000, 3162, 10000, 31622, 100000, 316227, 1000000, 3162277, 10000000});
  CHECK(geometric_checkpoints(10, 100, 1) == std::vector<std::uint64_t>{10, 100});
  CHECK_THROWS_AS(geometric_checkpoints(100, 10, 2), DomainError);
}

TEST_CASE("checkpoint sums") {
  CHECK(checkpoint_sums(MultiplicativeSpec::one(), {100}).sums[0] == 100);
  auto s = checkpoint_sums(e_tau(1), {10, 100, 1000});
  CHECK(s.sums[1] == 151);
  CHECK(s.sums[2] == 1566);
  auto e3 = checkpoint_sums(e_tau(2), {1000});
  CHECK(e3.sums[0] == brute_sum(e_tau(2), 1000));
  // Cross-check with the support: E^2 tau(n) - 1 summed over the support.
  Integer via_support = 1000;
  for (auto n : support_scan(ArithmeticFunction(MultiplicativeSpec::tau()), 2, 1000).elements)
    via_support += e_tau(2)(n) - 1;
  CHECK(e3.sums[0] == via_support);
  CHECK_THROWS_AS(checkpoint_sums(e_tau(1), {100, 10}), DomainError);
  CHECK_THROWS_AS(checkpoint_sums(e_tau(1), {}), DomainError);
}

TEST_CASE("sums are independent of sharding and threads") {
  std::vector<std::uint64_t> cps{1, 999, 1000, 4096, 65536, 99'999, 300'000};
  auto reference = checkpoint_sums(e_tau(1), cps, {.shard_size = 1 << 21, .threads = 1, .state_dir = ""});
  std::mt19937_64 rng(8);
  for (int c = 0; c < 6; ++c) {
    SumOptions o;
    o.shard_size = 1 + rng() % 50'000;
    o.threads = 1 + static_cast<unsigned>(rng() % 4);
    auto s = checkpoint_sums(e_tau(1), cps, o);
    CHECK(s.sums == reference.sums);
  }
  for (std::size_t i = 1; i < reference.sums.size(); ++i) CHECK(reference.sums[i] >= reference.sums[i - 1]);
  for (std::size_t i = 0; i < cps.size(); ++i) CHECK(reference.sums[i] >= cps[i]);
}

TEST_CASE("resumable shard state") {
  auto dir = fresh_dir("state");
  SumOptions o;
  o.shard_size = 10'000;
  o.state_dir = dir.string();
  auto first = checkpoint_sums(e_tau(2), {5'000, 50'000}, o);
  CHECK(first.shards_computed == 5);
  CHECK(first.shards_loaded == 0);
  auto second = checkpoint_sums(e_tau(2), {5'000, 50'000}, o);
  CHECK(second.shards_loaded == 5);
  CHECK(second.sums == first.sums);
  // A corrupted shard is recomputed.
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ofstream(entry.path()) << "garbage\n";
    break;
  }
  auto third = checkpoint_sums(e_tau(2), {5'000, 50'000}, o);
  CHECK(third.shards_loaded == 4);
  CHECK(third.sums == first.sums);
  std::filesystem::remove_all(dir);
  CHECK(spec_hash(e_tau(2)) == spec_hash(e_tau(2)));
  CHECK(spec_hash(e_tau(2)) != spec_hash(e_tau(3)));
}

TEST_CASE("sum configuration") {
  auto c = parse_sum_config("# schedule\ncheckpoints = 10, 100,1000\nthreads=2\nshard_size=4096\nstate_dir=/tmp/x\n");
  CHECK(c.checkpoints == std::vector<std::uint64_t>{10, 100, 1000});
  CHECK(c.options.threads == 2);
  CHECK(c.options.shard_size == 4096);
  CHECK(c.options.state_dir == "/tmp/x");
  auto g = parse_sum_config("start=1000\nstop=100000\nper_decade=1\n");
  CHECK(g.checkpoints == std::vector<std::uint64_t>{1000, 10000, 100000});
  CHECK_THROWS_AS(parse_sum_config("colour=blue\n"), DomainError);
  CHECK_THROWS_AS(parse_sum_config("threads=many\n"), DomainError);
  CHECK_THROWS_AS(load_sum_config("/nonexistent/schedule.cfg"), DomainError);
}

TEST_CASE("Euler constants") {
  auto one = euler_constants<long double>(MultiplicativeSpec::one(), ZetaWord::parse("1:1"), 10, 100'000);
  CHECK(std::fabs(one.mean_a.value - 1) < 1e-12L);

  auto t = euler_constants<long double>(e_tau(1), toth_word(2), 8, 1'000'000);
  REQUIRE(t.c_f);
  CHECK(t.residual_order == 5);
  CHECK(std::fabs(t.mean_a.value - t.c_f->value) < 1e-6L);
  // Independent value: mpmath product over primes below 2e5 plus the tail.
  CHECK(std::fabs(t.mean_a.value - 1.6023171L) < 2e-6L);

  auto g = euler_constants<long double>(e_gauss(), gaussian_word(), 8, 1'000'000);
  REQUIRE(g.c_f);
  CHECK(std::fabs(g.mean_a.value - g.c_f->value) < 1e-6L);

  auto k3 = euler_constants<long double>(e_tau(3, 3), tower_word_k(2, 3), 8, 1'000'000);
  REQUIRE(k3.c_f);
  CHECK(std::fabs(k3.mean_a.value - k3.c_f->value) < 1e-6L);

  // Without a zeta(s) factor there is no pole at s = 1.
  CHECK_THROWS_AS(euler_constants<long double>(e_tau(1), ZetaWord::parse("2:1"), 8), DomainError);
  // gauss_tau(p) = 2 at odd p: a double pole, so a word with zeta(s)^1 leaves a divergent residual.
  CHECK_THROWS_AS(euler_constants<long double>(MultiplicativeSpec::gauss_tau(), greedy_word(e_gauss(), 8), 6, 10'000),
                  DomainError);
}

TEST_CASE("Euler constants at higher precision") {
  Real::default_precision(40);
  auto t = euler_constants<Real>(e_tau(1), toth_word(2), 12, 100'000);
  auto l = euler_constants<long double>(e_tau(1), toth_word(2), 12, 100'000);
  CHECK(std::fabs(t.mean_a.value.convert_to<long double>() - l.mean_a.value) < 1e-12L);
}

TEST_CASE("Euler product against empirical means") {
  const std::uint64_t x = 1'000'000;
  struct Case {
    MultiplicativeSpec f;
    ZetaWord word;
    long double secondary;  // exponent of the next term, as a power of x
    int log_degree;
  };
  const Case cases[] = {
      {e_tau(1), toth_word(2), 0.5L, 0},
      {e_tau(3), tower_word(2), 1.0L / 16, 0},
      {e_tau(3, 3), tower_word_k(2, 3), 1.0L / 16, 1},
      {e_gauss(), gaussian_word(), 0.5L, 1},
  };
  for (const auto& c : cases) {
    auto ec = euler_constants<long double>(c.f, c.word, 8, 1'000'000);
    auto s = checkpoint_sums(c.f, {x});
    long double mean = s.sums[0].convert_to<long double>() / x;
    long double lx = std::log(static_cast<long double>(x));
    long double envelope = 10 * std::pow(static_cast<long double>(x), c.secondary - 1) * std::pow(lx, c.log_degree);
    CHECK_MESSAGE(std::fabs(mean - ec.mean_a.value) <= envelope, c.f.name() << " " << mean << " " << ec.mean_a.value);
  }
}

TEST_CASE("secondary constants") {
  auto b2 = secondary_constant_level<long double>(2, 6);
  CHECK(std::isfinite(b2.value));
  CHECK(std::fabs(b2.value * std::pow(1e7L, 1.0L / 16)) < 10);
  auto b1 = secondary_constant_level<long double>(1, 6, true);
  CHECK(std::isfinite(b1.value));
  CHECK_THROWS_AS(secondary_constant_level<long double>(1, 6), DomainError);
  CHECK_THROWS_AS(secondary_constant<long double>(e_tau(1), toth_word(3), 2, 6), DomainError);  // zeta^2(2s)
}

TEST_CASE("error fits") {
  auto one = checkpoint_sums(MultiplicativeSpec::one(), {10, 100, 1000, 10000});
  auto r = fit_error_exponent(one, {.mean_a = 1, .mean_b = 0, .scale = 0, .fit_log_degree = std::nullopt});
  CHECK(r.exact_zero);
  CHECK_FALSE(r.slope);
  CHECK(r.max_abs_delta == 0);
  CHECK_THROWS_AS(fit_error_exponent(checkpoint_sums(MultiplicativeSpec::one(), {10, 100, 1000}), {}), DomainError);

  auto cps = geometric_checkpoints(1000, 1'000'000, 2);
  auto t = checkpoint_sums(e_tau(1), cps);
  auto ec = euler_constants<long double>(e_tau(1), toth_word(2), 8, 1'000'000);
  auto b = secondary_constant<long double>(e_tau(1), toth_word(2), 2, 8);
  auto fit = fit_error_exponent(t, {.mean_a = ec.mean_a.value, .mean_b = b.value, .scale = 2, .fit_log_degree = {}},
                                "416/1117");
  REQUIRE(fit.slope);
  CHECK(*fit.slope < 0.6);
  CHECK(fit.predicted_exponent == "416/1117");

  auto k3 = checkpoint_sums(e_tau(3, 3), cps);
  auto ek3 = euler_constants<long double>(e_tau(3, 3), tower_word_k(2, 3), 8, 1'000'000);
  auto poly = fit_error_exponent(k3, {.mean_a = ek3.mean_a.value, .mean_b = 0, .scale = 16, .fit_log_degree = 1});
  CHECK(poly.fitted_log_poly.size() == 2);

  std::ostringstream csv;
  write_csv(csv, fit);
  std::string text = csv.str();
  CHECK(text.rfind("x,sum,main,secondary,delta\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(cps.size() + 1));
}

TEST_CASE("lowest support elements") {
  auto c = verify_min_elements(2, 100);
  CHECK(c.status == MinElementsCheck::Status::Pass);
  CHECK(c.elements == std::vector<std::uint64_t>{16, 48, 80, 81});
  CHECK(c.first_other == 81u);
  CHECK(c.other_lower_bound == Integer(81));

  auto one = verify_min_elements(1, 20);
  CHECK(one.status == MinElementsCheck::Status::Fail);
  CHECK(verify_min_elements(1, 12).status == MinElementsCheck::Status::Inconclusive);
  CHECK(verify_min_elements(1, 12).elements == std::vector<std::uint64_t>{4, 8, 9, 12});

  CHECK(verify_min_elements(3, 327'679).status == MinElementsCheck::Status::Inconclusive);
  CHECK(verify_min_elements(3, 327'680).status == MinElementsCheck::Status::Pass);
}
