#include "expdiv/eop.hpp"

#include <cmath>
#include <mutex>

namespace expdiv {

MultiplicativeSpec apply_E(const ArithmeticFunction& f) { return MultiplicativeSpec::e_power(f, 1); }

ValueTable apply_E_inverse(const MultiplicativeSpec& g, std::size_t size) {
  if (!g.prime_independent()) throw DomainError("apply_E_inverse: " + g.name() + " is not prime-independent");
  if (size > 63) throw DomainError("apply_E_inverse: table size limited to 63 (2^a must fit in 64 bits)");
  std::vector<Integer> v(size);
  for (std::size_t a = 1; a <= size; ++a) v[a - 1] = g.at_prime_power(2, static_cast<std::uint32_t>(a));
  return ValueTable(std::move(v));
}

MultiplicativeSpec exp_convolve(const MultiplicativeSpec& f, const MultiplicativeSpec& g) {
  return MultiplicativeSpec(rule::ExpConvolution{std::make_shared<const MultiplicativeSpec>(f),
                                                 std::make_shared<const MultiplicativeSpec>(g)});
}

// ---------------------------------------------------------------------------

EPowerEvaluator::EPowerEvaluator(ArithmeticFunction f) : base_(std::move(f)) {}

std::size_t EPowerEvaluator::memo_size() const {
  std::shared_lock lock(mutex_);
  return memo_.size();
}

Integer EPowerEvaluator::operator()(std::uint32_t m, std::uint64_t n) const {
  if (n == 0) throw DomainError("E^m f is defined on positive integers");
  if (m == 0) return evaluate(base_, n);
  if (n == 1) return 1;
  {
    std::shared_lock lock(mutex_);
    if (auto it = memo_.find({m, n}); it != memo_.end()) return it->second;
  }
  Integer value = 1;
  for (const auto& pp : factorize(n)) value *= (*this)(m - 1, pp.a);
  std::unique_lock lock(mutex_);
  memo_.emplace(Key{m, n}, value);
  return value;
}

Integer e_power_eval(const ArithmeticFunction& f, std::uint32_t m, std::uint64_t n) {
  return EPowerEvaluator(f)(m, n);
}

// ---------------------------------------------------------------------------

SupportProfile support_scan(const ArithmeticFunction& f, std::uint32_t m, std::uint64_t bound,
                            std::uint64_t scan_limit) {
  if (bound > scan_limit)
    throw DomainError("support_scan: bound " + std::to_string(bound) + " exceeds the evaluation limit " +
                      std::to_string(scan_limit));
  SupportProfile out{name_of(f), m, bound, {}};
  if (bound < 2) return out;

  if (m == 0) {
    for (std::uint64_t n = 2; n <= bound; ++n)
      if (evaluate(f, n) != 1) out.elements.push_back(n);
    return out;
  }

  // E^m f is prime-independent for m >= 1: tabulate E^{m-1} f(a) for every
  // exponent a that can occur below the bound.
  EPowerEvaluator eval(f);
  std::vector<Integer> local{Integer(1)};
  for (std::uint32_t a = 1; (std::uint64_t(1) << a) <= bound && a < 64; ++a) local.push_back(eval(m - 1, a));

  SpfSieve sieve(static_cast<std::uint32_t>(bound));
  for (std::uint32_t n = 2; n <= bound; ++n) {
    std::uint32_t rest = n;
    bool all_one = true;
    Integer value = 1;
    while (rest > 1) {
      std::uint32_t p = sieve.smallest_factor(rest);
      std::uint32_t a = 0;
      while (rest % p == 0) {
        rest /= p;
        ++a;
      }
      if (local[a] != 1) {
        all_one = false;
        value *= local[a];
      }
    }
    if (!all_one && value != 1) out.elements.push_back(n);
  }
  return out;
}

std::uint64_t min_support(const ArithmeticFunction& f, std::uint64_t search_limit) {
  if (auto* table = std::get_if<ValueTable>(&f)) search_limit = std::min<std::uint64_t>(search_limit, table->size());
  for (std::uint64_t n = 1; n <= search_limit; ++n)
    if (evaluate(f, n) != 1) return n;
  throw DomainError("min_support: " + name_of(f) + " equals 1 on 1.." + std::to_string(search_limit) +
                    " (constant-one has empty support)");
}

TowerInt tower_min(const ArithmeticFunction& f, std::uint32_t m, std::uint64_t digit_bound) {
  TowerInt n(min_support(f));
  for (std::uint32_t i = 0; i < m; ++i) n = TowerInt::pow2(n, digit_bound);
  return n;
}

// ---------------------------------------------------------------------------

bool is_multiplicative_prime_independent(const ValueTable& f) {
  const std::size_t N = f.size();
  if (N == 0) return true;
  if (f(1) != 1) return false;
  for (std::uint64_t n = 2; n <= N; ++n) {
    Integer product = 1;
    for (const auto& [p, a] : factorize(n)) {
      std::uint64_t two_pow = std::uint64_t(1) << a;  // 2^a <= p^a <= N
      std::uint64_t pa = 1;
      for (std::uint32_t i = 0; i < a; ++i) pa *= p;
      const Integer& local = f(pa);
      if (p != 2 && local != f(two_pow)) return false;
      product *= local;
    }
    if (product != f(n)) return false;
  }
  return true;
}

namespace {

bool is_power_of_two(std::uint64_t n) { return n && (n & (n - 1)) == 0; }

std::uint32_t log2_exact(std::uint64_t n) {
  std::uint32_t r = 0;
  while (n > 1) {
    n >>= 1;
    ++r;
  }
  return r;
}

// (3/2)^e >= c, e possibly astronomically large.
bool three_halves_power_at_least(const TowerInt& e, std::uint64_t c) {
  if (e >= TowerInt(std::uint64_t(200))) return true;  // (3/2)^200 > 2^64
  std::uint64_t ee = *e.to_u64();
  Integer lhs = mp::pow(Integer(3), static_cast<unsigned>(ee));
  Integer rhs = Integer(c) * pow2(ee);
  return lhs >= rhs;
}

// Decides n'(g) >= 2 n(g) for g = E^s f (s in {0, 1}).
bool second_element_far(const ArithmeticFunction& f, std::uint32_t s, std::uint64_t n_f) {
  constexpr std::uint64_t kScan = 1'000'000;
  if (s == 0) {
    std::uint64_t limit = 2 * n_f - 1;
    if (auto* table = std::get_if<ValueTable>(&f); table && limit > table->size()) return false;  // undecidable
    for (std::uint64_t n = n_f + 1; n <= limit; ++n)
      if (evaluate(f, n) != 1) return false;
    return true;
  }
  // g = Ef, n(g) = 2^{n(f)}. Elements of A(Ef) below 2 n(g) other than n(g)
  // need p^a with a in A(f); p = 2 forces an odd cofactor >= 3 or a >= n(f)+1,
  // p >= 3 forces 3^{n(f)} >= 2^{n(f)+1} once n(f) >= 2.
  if (n_f >= 19) return true;
  std::uint64_t n_g = std::uint64_t(1) << n_f;
  if (2 * n_g > kScan) return true;
  EPowerEvaluator eval(f);
  for (std::uint64_t n = n_g + 1; n < 2 * n_g; ++n)
    if (eval(1, n) != 1) return false;
  return true;
}

}  // namespace

M0Bound m0_bound(const ArithmeticFunction& f, std::uint32_t k) {
  if (k == 0) throw DomainError("m0_bound: k must be >= 1");
  const std::uint64_t n_f = min_support(f);  // rejects constant-one

  M0Bound out;
  bool pi = std::visit(
      [](const auto& g) -> bool {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, MultiplicativeSpec>) return g.prime_independent();
        else return is_multiplicative_prime_independent(g);
      },
      f);
  out.shift_for_prime_independence = !(pi && is_power_of_two(n_f));
  std::uint32_t s = out.shift_for_prime_independence ? 1 : 0;

  out.shift_for_second_element = !second_element_far(f, s, n_f);
  if (out.shift_for_second_element) ++s;
  out.shifts = s;

  // n(E^{j-1} g) and n(E^j g) for the preprocessed g = E^s f.
  TowerInt prev = s == 0 ? TowerInt(std::uint64_t(log2_exact(n_f))) : tower_min(f, s - 1);
  TowerInt cur = tower_min(f, s);
  const std::uint64_t two_k = 2ull * k;
  std::uint32_t j = 0;
  while (!(cur >= TowerInt(two_k) && three_halves_power_at_least(prev, two_k))) {
    prev = cur;
    cur = TowerInt::pow2(cur);
    ++j;
  }
  out.m_after_preprocessing = j;
  out.m0 = s + j;
  out.n_at_m0 = cur;
  return out;
}

// ---------------------------------------------------------------------------

GrowthStatistic growth_statistic(const MultiplicativeSpec& f, std::uint64_t limit, std::uint32_t local_range) {
  GrowthStatistic g;
  g.limit = limit;
  g.local_sup_range = local_range;
  for (std::uint32_t a = 1; a <= local_range; ++a) {
    double v = f(a).convert_to<double>();
    if (v > 0) g.local_sup = std::max(g.local_sup, std::log(v) / a);
  }
  std::vector<double> log_local{0.0};
  for (std::uint32_t a = 1; a < 64; ++a) {
    double v = f(a).convert_to<double>();
    log_local.push_back(v > 0 ? std::log(v) : 0.0);
  }
  SpfSieve sieve(static_cast<std::uint32_t>(limit));
  for (std::uint32_t n = 3; n <= limit; ++n) {
    double log_value = 0;
    std::uint32_t rest = n;
    while (rest > 1) {
      std::uint32_t p = sieve.smallest_factor(rest);
      std::uint32_t a = 0;
      while (rest % p == 0) {
        rest /= p;
        ++a;
      }
      log_value += log_local[a];
    }
    if (log_value <= 0) continue;
    double ln = std::log(double(n));
    double ratio = log_value * std::log(ln) / ln;
    if (ratio > g.max_ratio) {
      g.max_ratio = ratio;
      g.argmax = n;
    }
  }
  g.within_half_margin = g.max_ratio <= 1.5 * g.local_sup;
  return g;
}

}  // namespace expdiv
