#include "expdiv/arith.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace expdiv {

// ---------------------------------------------------------------------------
// Sieve and factorization

SpfSieve::SpfSieve(std::uint32_t limit) : limit_(std::max<std::uint32_t>(limit, 2)), spf_(limit_ + 1, 0) {
  for (std::uint32_t i = 2; i <= limit_; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = i;
      primes_.push_back(i);
    }
    for (std::uint32_t p : primes_) {
      std::uint64_t q = std::uint64_t(p) * i;
      if (p > spf_[i] || q > limit_) break;
      spf_[q] = p;
    }
  }
}

Factorization SpfSieve::factorize(std::uint32_t n) const {
  if (n == 0 || n > limit_) throw DomainError("SpfSieve::factorize: argument out of table range");
  Factorization out;
  while (n > 1) {
    std::uint32_t p = spf_[n];
    std::uint32_t a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    out.push_back({p, a});
  }
  return out;
}

std::uint64_t configured_sieve_bound() {
  if (const char* env = std::getenv("EXPDIV_SIEVE_BOUND")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v >= 2) return v;
  }
  return 100'000'000ULL;
}

const SpfSieve& shared_sieve() {
  static const SpfSieve sieve(static_cast<std::uint32_t>(std::min<std::uint64_t>(configured_sieve_bound(), 1u << 22)));
  return sieve;
}

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(u128(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

// Deterministic for all 64-bit n with these bases.
bool miller_rabin(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t pollard_rho(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    auto step = [&](std::uint64_t x) { return (mulmod(x, x, n) + c) % n; };
    std::uint64_t x = 2, y = 2, d = 1;
    while (d == 1) {
      x = step(x);
      y = step(step(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void split(std::uint64_t n, std::vector<std::uint64_t>& primes) {
  if (n == 1) return;
  if (miller_rabin(n)) {
    primes.push_back(n);
    return;
  }
  std::uint64_t d = pollard_rho(n);
  split(d, primes);
  split(n / d, primes);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  const SpfSieve& s = shared_sieve();
  if (n <= s.limit()) return s.is_prime(static_cast<std::uint32_t>(n));
  return miller_rabin(n);
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  const SpfSieve& s = shared_sieve();
  if (n <= s.limit()) return s.factorize(static_cast<std::uint32_t>(n));

  std::vector<std::uint64_t> primes;
  for (std::uint32_t p : s.primes()) {
    if (std::uint64_t(p) * p > n) break;
    if (p > 1000) break;
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  if (n <= s.limit() && n > 1) {
    for (const auto& pp : s.factorize(static_cast<std::uint32_t>(n)))
      for (std::uint32_t i = 0; i < pp.a; ++i) primes.push_back(pp.p);
  } else {
    split(n, primes);
  }
  std::sort(primes.begin(), primes.end());
  Factorization out;
  for (std::uint64_t p : primes) {
    if (!out.empty() && out.back().p == p)
      ++out.back().a;
    else
      out.push_back({p, 1});
  }
  return out;
}

std::uint64_t reconstruct(const Factorization& f) {
  std::uint64_t n = 1;
  for (const auto& [p, a] : f)
    for (std::uint32_t i = 0; i < a; ++i) n *= p;
  return n;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (const auto& [p, a] : factorize(n)) {
    std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (std::uint32_t k = 1; k <= a; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Integer binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.backend().data(), n, k);
  return r;
}

// ---------------------------------------------------------------------------
// Local values at p^a

namespace {

// Solutions of sum a_i e_i = a in non-negative integers.
Integer tau_multi_local(std::span<const std::uint32_t> exponents, std::uint32_t a) {
  std::vector<Integer> ways(a + 1, Integer(0));
  ways[0] = 1;
  for (std::uint32_t w : exponents)
    for (std::uint32_t t = w; t <= a; ++t) ways[t] += ways[t - w];
  return ways[a];
}

Integer gauss_local(std::uint64_t p, std::uint32_t a) {
  if (p == 2) return 2 * a + 1;
  if (p % 4 == 1) return Integer(a + 1) * (a + 1);
  return a + 1;
}

}  // namespace

Integer tau_multi(std::span<const std::uint32_t> exponents, std::uint64_t n) {
  if (exponents.empty()) throw DomainError("tau_multi: empty exponent tuple");
  for (auto e : exponents)
    if (e == 0) throw DomainError("tau_multi: exponents must be positive");
  Integer r = 1;
  for (const auto& pp : factorize(n)) r *= tau_multi_local(exponents, pp.a);
  return r;
}

Integer tau_k(std::uint32_t k, std::uint64_t n) {
  if (k == 0) throw DomainError("tau_k: k must be positive");
  Integer r = 1;
  for (const auto& pp : factorize(n)) r *= binomial(pp.a + k - 1, k - 1);
  return r;
}

int mobius_scaled(std::uint32_t k, std::uint64_t n) {
  if (k == 0) throw DomainError("mobius_scaled: k must be positive");
  int r = 1;
  for (const auto& pp : factorize(n)) {
    if (pp.a != k) return 0;
    r = -r;
  }
  return r;
}

Integer mobius_power(std::uint32_t k, std::uint64_t n) {
  if (k == 0) throw DomainError("mobius_power: k must be positive");
  Integer r = 1;
  for (const auto& pp : factorize(n)) {
    if (pp.a > k) return 0;
    Integer v = binomial(k, pp.a);
    r *= (pp.a % 2 ? Integer(-v) : v);
  }
  return r;
}

Integer gauss_tau(std::uint64_t n) {
  Integer r = 1;
  for (const auto& pp : factorize(n)) r *= gauss_local(pp.p, pp.a);
  return r;
}

// ---------------------------------------------------------------------------
// ValueTable

ValueTable::ValueTable(std::vector<Integer> values_from_one) {
  values_.reserve(values_from_one.size() + 1);
  for (auto& v : values_from_one) values_.push_back(std::move(v));
}

const Integer& ValueTable::operator()(std::uint64_t n) const {
  if (n == 0 || n >= values_.size())
    throw DomainError("ValueTable: index " + std::to_string(n) + " outside 1.." + std::to_string(size()));
  return values_[n];
}

ValueTable operator+(const ValueTable& f, const ValueTable& g) {
  std::size_t n = std::min(f.size(), g.size());
  std::vector<Integer> v(n);
  for (std::size_t i = 1; i <= n; ++i) v[i - 1] = f(i) + g(i);
  return ValueTable(std::move(v));
}

ValueTable operator*(const ValueTable& f, const ValueTable& g) {
  std::size_t n = std::min(f.size(), g.size());
  std::vector<Integer> v(n);
  for (std::size_t i = 1; i <= n; ++i) v[i - 1] = f(i) * g(i);
  return ValueTable(std::move(v));
}

ValueTable ValueTable::tabulate(const MultiplicativeSpec& f, std::size_t size) {
  std::vector<Integer> v(size);
  for (std::size_t i = 1; i <= size; ++i) v[i - 1] = f(i);
  return ValueTable(std::move(v));
}

ValueTable dirichlet_convolve(const ValueTable& f, const ValueTable& g) {
  std::size_t n = std::min(f.size(), g.size());
  std::vector<Integer> v(n, Integer(0));
  for (std::size_t d = 1; d <= n; ++d) {
    if (f(d) == 0) continue;
    for (std::size_t q = 1; d * q <= n; ++q) v[d * q - 1] += f(d) * g(q);
  }
  return ValueTable(std::move(v));
}

// ---------------------------------------------------------------------------
// MultiplicativeSpec

MultiplicativeSpec::MultiplicativeSpec(Rule r) : rule_(std::move(r)) {}

MultiplicativeSpec MultiplicativeSpec::tau_k(std::uint32_t k) {
  if (k == 0) throw DomainError("tau_k: k must be positive");
  return MultiplicativeSpec(rule::TauK{k});
}

MultiplicativeSpec MultiplicativeSpec::tau_multi(std::vector<std::uint32_t> exponents) {
  if (exponents.empty()) throw DomainError("tau_multi: empty exponent tuple");
  for (auto e : exponents)
    if (e == 0) throw DomainError("tau_multi: exponents must be positive");
  return MultiplicativeSpec(rule::TauMulti{std::move(exponents)});
}

MultiplicativeSpec MultiplicativeSpec::mobius_scaled(std::uint32_t k) {
  if (k == 0) throw DomainError("mobius_scaled: k must be positive");
  return MultiplicativeSpec(rule::MobiusScaled{k});
}

MultiplicativeSpec MultiplicativeSpec::mobius_power(std::uint32_t k) {
  if (k == 0) throw DomainError("mobius_power: k must be positive");
  return MultiplicativeSpec(rule::MobiusPower{k});
}

MultiplicativeSpec MultiplicativeSpec::e_power(const ArithmeticFunction& base, std::uint32_t m) {
  if (m == 0) {
    if (auto* spec = std::get_if<MultiplicativeSpec>(&base)) return *spec;
    throw DomainError("e_power: E^0 of a value table is not a multiplicative spec");
  }
  // Flatten E^j(E^i f) into E^{i+j} f.
  if (auto* spec = std::get_if<MultiplicativeSpec>(&base)) {
    if (auto* inner = std::get_if<rule::EPower>(&spec->rule()))
      return MultiplicativeSpec(rule::EPower{inner->base, inner->m + m});
  }
  return MultiplicativeSpec(rule::EPower{std::make_shared<const ArithmeticFunction>(base), m});
}

Integer MultiplicativeSpec::at_prime_power(std::uint64_t p, std::uint32_t a) const {
  if (a == 0) return 1;
  return std::visit(
      [&](const auto& r) -> Integer {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rule::One>) {
          return 1;
        } else if constexpr (std::is_same_v<R, rule::TauMulti>) {
          return tau_multi_local(r.exponents, a);
        } else if constexpr (std::is_same_v<R, rule::TauK>) {
          return binomial(a + r.k - 1, r.k - 1);
        } else if constexpr (std::is_same_v<R, rule::MobiusScaled>) {
          return a == r.k ? -1 : 0;
        } else if constexpr (std::is_same_v<R, rule::MobiusPower>) {
          if (a > r.k) return 0;
          Integer v = binomial(r.k, a);
          return a % 2 ? Integer(-v) : v;
        } else if constexpr (std::is_same_v<R, rule::GaussTau>) {
          return gauss_local(p, a);
        } else if constexpr (std::is_same_v<R, rule::EPower>) {
          // (E^m f)(p^a) = (E^{m-1} f)(a)
          if (r.m == 1) return evaluate(*r.base, a);
          return MultiplicativeSpec(rule::EPower{r.base, r.m - 1})(a);
        } else {
          Integer sum = 0;
          for (std::uint32_t d = 1; d <= a; ++d)
            if (a % d == 0) sum += r.f->at_prime_power(p, d) * r.g->at_prime_power(p, a / d);
          return sum;
        }
      },
      rule_);
}

Integer MultiplicativeSpec::operator()(std::uint64_t n) const {
  if (n == 0) throw DomainError("arithmetic functions are defined on positive integers");
  Integer r = 1;
  for (const auto& [p, a] : factorize(n)) r *= at_prime_power(p, a);
  return r;
}

bool MultiplicativeSpec::prime_independent() const {
  return std::visit(
      [](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rule::GaussTau>) return false;
        else if constexpr (std::is_same_v<R, rule::ExpConvolution>)
          return r.f->prime_independent() && r.g->prime_independent();
        else return true;
      },
      rule_);
}

std::string MultiplicativeSpec::name() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rule::One>) return "one";
        else if constexpr (std::is_same_v<R, rule::TauMulti>) {
          std::string s = "tau(";
          for (std::size_t i = 0; i < r.exponents.size(); ++i)
            s += (i ? "," : "") + std::to_string(r.exponents[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<R, rule::TauK>) {
          return r.k == 2 ? "tau" : "tau" + std::to_string(r.k);
        } else if constexpr (std::is_same_v<R, rule::MobiusScaled>) return "mu_scaled" + std::to_string(r.k);
        else if constexpr (std::is_same_v<R, rule::MobiusPower>) return "mu_power" + std::to_string(r.k);
        else if constexpr (std::is_same_v<R, rule::GaussTau>) return "gauss";
        else if constexpr (std::is_same_v<R, rule::EPower>)
          return "E" + (r.m == 1 ? std::string() : std::to_string(r.m)) + name_of(*r.base);
        else return "(" + r.f->name() + " *e " + r.g->name() + ")";
      },
      rule_);
}

Integer evaluate(const ArithmeticFunction& f, std::uint64_t n) {
  return std::visit([n](const auto& g) -> Integer { return g(n); }, f);
}

std::string name_of(const ArithmeticFunction& f) {
  if (auto* spec = std::get_if<MultiplicativeSpec>(&f)) return spec->name();
  return "table[" + std::to_string(std::get<ValueTable>(f).size()) + "]";
}

}  // namespace expdiv
