#include "expdiv/sums.hpp"

#include "expdiv/eop.hpp"
#include "expdiv/zeta.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace expdiv {

namespace {

using i128 = __int128;

Integer to_integer(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer r = Integer(static_cast<std::uint64_t>(u >> 64));
  r <<= 64;
  r += Integer(static_cast<std::uint64_t>(u));
  return neg ? Integer(-r) : r;
}

std::int64_t to_int64(const Integer& v, const char* what) {
  if (v > Integer(INT64_MAX) || v < Integer(INT64_MIN))
    throw DomainError(std::string(what) + ": value " + v.str() + " does not fit in 64 bits");
  return v.convert_to<std::int64_t>();
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t n) {
  std::vector<char> composite(n + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = 1;
  }
  return primes;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// f(p^a) as int64, cached for the small primes of a segmented sieve.
class LocalValues {
public:
  LocalValues(const MultiplicativeSpec& f, const std::vector<std::uint32_t>& small_primes, std::uint64_t x_max)
      : f_(f), independent_(f.prime_independent()) {
    if (independent_) {
      for (std::uint32_t a = 0; a < 64; ++a) shared_.push_back(to_int64(f.at_prime_power(2, a), "sieve"));
      return;
    }
    for (auto p : small_primes) {
      std::vector<std::int64_t> v{1};
      for (std::uint64_t pa = p; pa <= x_max; pa *= p)
        v.push_back(to_int64(f.at_prime_power(p, static_cast<std::uint32_t>(v.size())), "sieve"));
      per_prime_.push_back(std::move(v));
    }
  }

  std::int64_t small(std::size_t prime_index, std::uint32_t p, std::uint32_t a) const {
    (void)p;
    return independent_ ? shared_[a] : per_prime_[prime_index][a];
  }
  std::int64_t large(std::uint64_t q) const {
    return independent_ ? shared_[1] : to_int64(f_.at_prime_power(q, 1), "sieve");
  }

private:
  const MultiplicativeSpec& f_;
  bool independent_;
  std::vector<std::int64_t> shared_;
  std::vector<std::vector<std::int64_t>> per_prime_;
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw DomainError("sieve: product overflows 64 bits");
  return r;
}

// Values f(n) for n in [lo, hi), lo >= 1, into out[0 .. hi-lo).
void sieve_segment(const LocalValues& local, const std::vector<std::uint32_t>& small_primes, std::uint64_t lo,
                   std::uint64_t hi, std::vector<std::int64_t>& out, std::vector<std::uint32_t>& rest) {
  const std::size_t len = hi - lo;
  out.assign(len, 1);
  rest.resize(len);
  for (std::size_t i = 0; i < len; ++i) rest[i] = static_cast<std::uint32_t>(lo + i);
  for (std::size_t pi = 0; pi < small_primes.size(); ++pi) {
    const std::uint32_t p = small_primes[pi];
    if (std::uint64_t(p) * p >= hi) break;
    std::uint64_t first = (lo + p - 1) / p * p;
    for (std::uint64_t n = first; n < hi; n += p) {
      std::size_t i = n - lo;
      std::uint32_t a = 0;
      do {
        rest[i] /= p;
        ++a;
      } while (rest[i] % p == 0);
      std::int64_t v = local.small(pi, p, a);
      if (v != 1) out[i] = checked_mul(out[i], v);
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (rest[i] <= 1) continue;
    std::int64_t v = local.large(rest[i]);
    if (v != 1) out[i] = checked_mul(out[i], v);
  }
}

}  // namespace

std::vector<std::int64_t> sieve_values(const MultiplicativeSpec& f, std::uint64_t x_max, std::size_t memory_budget) {
  if (x_max > kMaxSumBound) throw DomainError("sieve_values: x_max above " + std::to_string(kMaxSumBound));
  if ((x_max + 1) * (sizeof(std::int64_t) + sizeof(std::uint32_t)) > memory_budget)
    throw DomainError("sieve_values: table of " + std::to_string(x_max) +
                      " values exceeds the memory budget; use checkpoint_sums, which sieves in segments");
  auto primes = primes_up_to(isqrt(x_max) + 1);
  LocalValues local(f, primes, x_max);
  std::vector<std::int64_t> values;
  std::vector<std::uint32_t> rest;
  if (x_max >= 1) sieve_segment(local, primes, 1, x_max + 1, values, rest);
  values.insert(values.begin(), 0);
  return values;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t start, std::uint64_t stop, unsigned per_decade) {
  if (start == 0 || stop < start) throw DomainError("geometric_checkpoints: need 1 <= start <= stop");
  if (per_decade == 0) throw DomainError("geometric_checkpoints: per_decade must be positive");
  std::vector<std::uint64_t> out;
  for (unsigned i = 0;; ++i) {
    long double x = start * std::pow(10.0L, static_cast<long double>(i) / per_decade);
    auto v = static_cast<std::uint64_t>(std::floor(x * (1 + 1e-15L)));
    if (v > stop) break;
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  if (out.back() != stop) out.push_back(stop);
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

SumConfig parse_sum_config(const std::string& text) {
  SumConfig cfg;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    static const char* known[] = {"checkpoints", "start", "stop", "per_decade", "shard_size", "threads", "state_dir"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  auto number = [&](const std::string& key, std::uint64_t fallback) -> std::uint64_t {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      std::size_t used = 0;
      auto v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::logic_error&) {
      throw DomainError("config: '" + key + "' must be a non-negative integer");
    }
  };
  if (auto it = kv.find("checkpoints"); it != kv.end()) {
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        cfg.checkpoints.push_back(std::stoull(item));
      } catch (const std::logic_error&) {
        throw DomainError("config: malformed checkpoint '" + item + "'");
      }
    }
  } else {
    cfg.checkpoints = geometric_checkpoints(number("start", 1000), number("stop", 10'000'000),
                                            static_cast<unsigned>(number("per_decade", 2)));
  }
  cfg.options.shard_size = number("shard_size", cfg.options.shard_size);
  cfg.options.threads = static_cast<unsigned>(number("threads", cfg.options.threads));
  if (auto it = kv.find("state_dir"); it != kv.end()) cfg.options.state_dir = it->second;
  return cfg;
}

SumConfig load_sum_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sum_config(ss.str());
}

// ---------------------------------------------------------------------------
// Checkpoint sums

std::string spec_hash(const MultiplicativeSpec& f) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : f.name()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct ShardResult {
  std::uint64_t lo = 0, hi = 0;  // [lo, hi)
  Integer total;
  std::vector<std::pair<std::uint64_t, Integer>> partial;  // checkpoint -> sum over [lo, c]
  bool loaded = false;
};

std::filesystem::path shard_path(const std::string& dir, const std::string& hash, std::uint64_t lo, std::uint64_t hi) {
  return std::filesystem::path(dir) / (hash + "_" + std::to_string(lo) + "_" + std::to_string(hi) + ".shard");
}

std::optional<ShardResult> load_shard(const std::filesystem::path& path, const std::string& name,
                                      const std::vector<std::uint64_t>& expected) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv["function"] != name || !kv.count("total") || !kv.count("checkpoints") || kv["end"] != "ok")
    return std::nullopt;
  ShardResult r;
  try {
    r.lo = std::stoull(kv.at("lo"));
    r.hi = std::stoull(kv.at("hi"));
    r.total = Integer(kv.at("total"));
    std::stringstream ss(kv["checkpoints"]);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) return std::nullopt;
      r.partial.emplace_back(std::stoull(item.substr(0, colon)), Integer(item.substr(colon + 1)));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (r.partial.size() != expected.size()) return std::nullopt;
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (r.partial[i].first != expected[i]) return std::nullopt;
  r.loaded = true;
  return r;
}

void save_shard(const std::filesystem::path& path, const std::string& name, const ShardResult& r) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << "function=" << name << "\nlo=" << r.lo << "\nhi=" << r.hi << "\ntotal=" << r.total.str() << "\ncheckpoints=";
    for (std::size_t i = 0; i < r.partial.size(); ++i)
      out << (i ? "," : "") << r.partial[i].first << ":" << r.partial[i].second.str();
    out << "\nend=ok\n";
    if (!out) throw DomainError("cannot write shard file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

CheckpointSums checkpoint_sums(const MultiplicativeSpec& f, const std::vector<std::uint64_t>& checkpoints,
                               const SumOptions& options) {
  if (checkpoints.empty()) throw DomainError("checkpoint_sums: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0) throw DomainError("checkpoint_sums: checkpoints must be positive");
    if (i && checkpoints[i] <= checkpoints[i - 1]) throw DomainError("checkpoint_sums: checkpoints must be increasing");
  }
  const std::uint64_t x_max = checkpoints.back();
  if (x_max > kMaxSumBound) throw DomainError("checkpoint_sums: x above " + std::to_string(kMaxSumBound));
  if (options.shard_size == 0) throw DomainError("checkpoint_sums: shard size must be positive");

  const auto primes = primes_up_to(isqrt(x_max) + 1);
  const LocalValues local(f, primes, x_max);
  const std::string name = f.name();
  const std::string hash = spec_hash(f);
  if (!options.state_dir.empty()) std::filesystem::create_directories(options.state_dir);

  std::vector<ShardResult> shards;
  for (std::uint64_t lo = 1; lo <= x_max; lo += options.shard_size) {
    ShardResult s;
    s.lo = lo;
    s.hi = std::min(x_max + 1, lo + options.shard_size);
    shards.push_back(std::move(s));
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    std::vector<std::int64_t> values;
    std::vector<std::uint32_t> rest;
    for (std::size_t idx; (idx = next.fetch_add(1)) < shards.size();) {
      try {
        ShardResult& s = shards[idx];
        std::vector<std::uint64_t> inside;
        for (auto c : checkpoints)
          if (c >= s.lo && c < s.hi) inside.push_back(c);
        std::filesystem::path path;
        if (!options.state_dir.empty()) {
          path = shard_path(options.state_dir, hash, s.lo, s.hi);
          if (auto loaded = load_shard(path, name, inside)) {
            s = std::move(*loaded);
            continue;
          }
        }
        sieve_segment(local, primes, s.lo, s.hi, values, rest);
        i128 acc = 0;
        std::size_t ci = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          acc += values[i];
          if (ci < inside.size() && s.lo + i == inside[ci]) s.partial.emplace_back(inside[ci++], to_integer(acc));
        }
        s.total = to_integer(acc);
        if (!options.state_dir.empty()) save_shard(path, name, s);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(shards.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  CheckpointSums out;
  out.function = name;
  out.checkpoints = checkpoints;
  Integer running = 0;
  for (const auto& s : shards) {
    for (const auto& [c, partial] : s.partial) out.sums.push_back(running + partial);
    running += s.total;
    (s.loaded ? out.shards_loaded : out.shards_computed)++;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Euler products

namespace {

template <class T>
T log_real(const T& x) {
  using std::log;
  using boost::multiprecision::log;
  return log(x);
}

template <class T>
T exp_real(const T& x) {
  using std::exp;
  using boost::multiprecision::exp;
  return exp(x);
}

// Residual R = S_p(x) prod (1 - x^a)^{e_a}, exact to the given order.
ExactSeries residual_series(const MultiplicativeSpec& f, const ZetaWord& w, Eigen::Index order, std::uint64_t p) {
  ExactSeries r = local_series(f, order, f.prime_independent() ? 0 : p);
  for (const auto& fac : w.factors()) {
    auto a = fac.scale.to_u64();
    if (a && *a <= static_cast<std::uint64_t>(order)) r.multiply_binomial(static_cast<Eigen::Index>(*a), fac.exponent);
  }
  return r;
}

// sum_j h_j x^j over the computed coefficients.
template <class T>
T evaluate_series(const ExactSeries& s, const T& x) {
  T acc = 0;
  for (Eigen::Index j = s.order(); j >= 0; --j) acc = acc * x + detail::convert<T>(s[j]);
  return acc;
}

// prod_{a in word, a != skip} zeta(a / b)^{e_a}.
template <class T>
T zeta_factor_product(const ZetaWord& w, std::uint64_t b, std::uint64_t skip, int digits) {
  T prod = 1;
  for (const auto& fac : w.factors()) {
    auto a = fac.scale.to_u64();
    if (a && *a == skip) continue;
    // zeta(sigma) - 1 < 2^{1-sigma}; beyond 4(digits+8) it is 1 to working precision.
    if (!a || *a > b * 4 * static_cast<std::uint64_t>(digits + 8)) continue;
    T z = zeta_real<T>(Rational(Integer(*a), Integer(b)), std::min(digits + 3, 50));
    for (long i = 0; i < std::abs(fac.exponent); ++i) prod = fac.exponent > 0 ? prod * z : prod / z;
  }
  return prod;
}

// prod_p H_p(p^{-1/b}) with the residual of the word; b = 1 gives H(1).
template <class T>
EulerValue<T> residual_product(const MultiplicativeSpec& f, const ZetaWord& w, std::uint64_t b, int digits,
                               std::uint64_t& residual_order) {
  const bool independent = f.prime_independent();
  const long double ln10 = std::log(10.0L);
  const long double target = (digits + 4) * ln10;

  // Order needed so that x^J is negligible at p = 2, x = 2^{-1/b}.
  auto needed_order = [&](std::uint64_t p) {
    long double j = target * b / std::log(static_cast<long double>(p));
    return static_cast<Eigen::Index>(std::ceil(j)) + 8;
  };
  constexpr Eigen::Index kMaxOrder = 4096;

  // Sample the residual at p = 2 (and a few primes when prime-dependent) to
  // find its order and a coefficient envelope for the prime tail.
  residual_order = 0;
  long double envelope = 0;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    if (independent && p > 2) break;
    Eigen::Index order = std::min(kMaxOrder, needed_order(2));
    ExactSeries r = residual_series(f, w, order, p);
    auto t = r.first_nonzero_above_constant();
    std::uint64_t t_order = t ? static_cast<std::uint64_t>(*t) : static_cast<std::uint64_t>(order + 1);
    residual_order = residual_order ? std::min(residual_order, t_order) : t_order;
    // C with |H_p - 1| <= C p^{-T'/b} for p >= 2.
    long double c = 0;
    for (Eigen::Index j = t_order; j <= r.order(); ++j)
      c += std::fabs(r[j].convert_to<long double>()) * std::pow(2.0L, -static_cast<long double>(j - t_order) / b);
    envelope = std::max(envelope, c);
  }
  const long double decay = static_cast<long double>(residual_order) / b;  // H_p - 1 ~ p^{-decay}
  if (decay <= 1)
    throw DomainError("residual Euler product does not converge at s = 1/" + std::to_string(b) +
                      " (residual order " + std::to_string(residual_order) + ")");

  // Prime cut-off P with envelope * P^{1-decay} / (decay - 1) below 10^{-digits-2}.
  long double p_needed =
      std::pow(envelope * std::pow(10.0L, digits + 2) / (decay - 1), 1.0L / (decay - 1));
  std::uint64_t limit = static_cast<std::uint64_t>(std::clamp(p_needed, 100.0L, 2'000'000.0L));

  EulerValue<T> out;
  out.prime_limit = limit;
  out.tail_bound = T(envelope * std::pow(static_cast<long double>(limit), 1 - decay) / (decay - 1));

  T log_sum = 0;
  const Eigen::Index top = std::min(kMaxOrder, std::max<Eigen::Index>(needed_order(2), residual_order + 1));
  std::optional<ExactSeries> shared;
  if (independent) shared = residual_series(f, w, top, 2);
  for (std::uint32_t p : primes_up_to(limit)) {
    Eigen::Index order = std::min(top, std::max<Eigen::Index>(needed_order(p), residual_order + 1));
    ExactSeries r = shared ? shared->truncated(order) : residual_series(f, w, order, p);
    T x = b == 1 ? T(1) / T(p) : detail::pow_real<T>(T(p), T(-1) / T(b));
    T h = evaluate_series<T>(r, x);
    if (h <= 0) throw DomainError("residual Euler factor is not positive at p = " + std::to_string(p));
    log_sum += log_real<T>(h);
  }
  out.value = exp_real<T>(log_sum);
  return out;
}

}  // namespace

template <class T>
EulerConstants<T> euler_constants(const MultiplicativeSpec& f, const ZetaWord& word, int digits,
                                  std::uint64_t direct_prime_limit) {
  if (digits < 1 || digits > 30) throw DomainError("euler_constants: digits must be in 1..30");
  if (word.exponent_at(TowerInt(std::uint64_t(1))) != 1)
    throw DomainError("euler_constants: the word needs zeta(s) to the first power for a simple pole at s = 1");

  EulerConstants<T> out;
  EulerValue<T> h = residual_product<T>(f, word, 1, digits, out.residual_order);
  T z = zeta_factor_product<T>(word, 1, 1, digits);
  out.mean_a = {z * h.value, h.tail_bound, h.prime_limit};

  // Direct product, applicable when f(p) = 1 at every prime.
  const bool independent = f.prime_independent();
  if (independent && f.at_prime_power(2, 1) != 1) return out;
  const long double eps = std::pow(10.0L, -(digits + 4));
  T log_sum = 0;
  long double c2 = 0;
  for (std::uint32_t p : primes_up_to(direct_prime_limit)) {
    if (!independent && f.at_prime_power(p, 1) != 1) return out;
    T term = 0, ppow = 1, prev = 1;
    for (std::uint32_t a = 1; a < 200; ++a) {
      ppow /= T(p);
      if (a >= 2 && ppow < T(eps) * T(eps)) break;
      T fa = T(f.at_prime_power(p, a).template convert_to<long double>());
      term += (fa - prev) * ppow;
      prev = fa;
    }
    if (p <= 13) c2 = std::max(c2, std::fabs((f.at_prime_power(p, 2) - 1).template convert_to<long double>()));
    log_sum += log_real<T>(1 + term);
  }
  EulerValue<T> cf;
  cf.prime_limit = direct_prime_limit;
  // sum_{p > P} p^{-2} < 1 / (P log P) for P >= 2; doubled to cover higher powers.
  long double P = static_cast<long double>(direct_prime_limit);
  cf.tail_bound = T(2 * std::max(c2, 1.0L) / (P * std::log(P)));
  cf.value = exp_real<T>(log_sum);
  out.c_f = cf;
  return out;
}

template <class T>
EulerValue<T> secondary_constant(const MultiplicativeSpec& f, const ZetaWord& word, std::uint64_t b, int digits) {
  if (b < 2) throw DomainError("secondary_constant: scale must be >= 2");
  if (digits < 1 || digits > 30) throw DomainError("secondary_constant: digits must be in 1..30");
  if (word.exponent_at(TowerInt(b)) != 1)
    throw DomainError("secondary_constant: the word needs zeta(" + std::to_string(b) +
                      "s) to the first power for a simple pole at s = 1/" + std::to_string(b));
  std::uint64_t order = 0;
  EulerValue<T> h = residual_product<T>(f, word, b, digits, order);
  T z = zeta_factor_product<T>(word, b, b, digits);
  return {z * h.value, h.tail_bound, h.prime_limit};
}

ZetaWord greedy_word(const MultiplicativeSpec& f, Eigen::Index degree) {
  return greedy_factor(local_series(f, degree)).word;
}

template <class T>
EulerValue<T> secondary_constant_level(std::uint32_t m, int digits, bool allow_level_one) {
  const ArithmeticFunction tau(MultiplicativeSpec::tau());
  if (m == 1) {
    if (!allow_level_one) throw DomainError("secondary_constant_level: m = 1 needs the greedy word; enable it explicitly");
    MultiplicativeSpec f = MultiplicativeSpec::e_power(tau, 2);
    return secondary_constant<T>(f, greedy_word(f, 16), 4, digits);
  }
  if (m != 2) throw DomainError("secondary_constant_level: only m = 1, 2 have residual series within reach");
  return secondary_constant<T>(MultiplicativeSpec::e_power(tau, 3), tower_word(2), 16, digits);
}

template EulerConstants<long double> euler_constants<long double>(const MultiplicativeSpec&, const ZetaWord&, int,
                                                                  std::uint64_t);
template EulerConstants<Real> euler_constants<Real>(const MultiplicativeSpec&, const ZetaWord&, int, std::uint64_t);
template EulerValue<long double> secondary_constant<long double>(const MultiplicativeSpec&, const ZetaWord&,
                                                                 std::uint64_t, int);
template EulerValue<Real> secondary_constant<Real>(const MultiplicativeSpec&, const ZetaWord&, std::uint64_t, int);
template EulerValue<long double> secondary_constant_level<long double>(std::uint32_t, int, bool);
template EulerValue<Real> secondary_constant_level<Real>(std::uint32_t, int, bool);

// ---------------------------------------------------------------------------
// Fits

FitReport fit_error_exponent(const CheckpointSums& cs, const MainTerms& terms, const std::string& predicted) {
  const std::size_t n = cs.checkpoints.size();
  if (n < 4) throw DomainError("fit_error_exponent: need at least 4 checkpoints");
  FitReport r;
  r.function = cs.function;
  r.terms = terms;
  r.predicted_exponent = predicted;

  auto secondary_power = [&](long double x) {
    return terms.scale ? std::pow(x, 1.0L / static_cast<long double>(terms.scale)) : 0.0L;
  };

  if (terms.fit_log_degree && terms.scale) {
    const unsigned d = *terms.fit_log_degree;
    if (n < d + 2) throw DomainError("fit_error_exponent: too few checkpoints for the log-polynomial fit");
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    Mat a(n, d + 1);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double x = cs.checkpoints[i];
      long double lx = std::log(x);
      for (unsigned j = 0; j <= d; ++j) a(i, j) = std::pow(lx, static_cast<long double>(j));
      y(i) = (cs.sums[i].convert_to<long double>() - terms.mean_a * x) / secondary_power(x);
    }
    Vec c = a.colPivHouseholderQr().solve(y);
    r.fitted_log_poly.assign(c.data(), c.data() + c.size());
  }

  std::vector<std::pair<long double, long double>> points;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    FitRow row;
    row.x = cs.checkpoints[i];
    row.sum = cs.sums[i];
    long double x = row.x;
    row.main = terms.mean_a * x;
    if (!r.fitted_log_poly.empty()) {
      long double poly = 0, lx = std::log(x);
      for (auto it = r.fitted_log_poly.rbegin(); it != r.fitted_log_poly.rend(); ++it) poly = poly * lx + *it;
      row.secondary = poly * secondary_power(x);
    } else {
      row.secondary = terms.mean_b * secondary_power(x);
    }
    row.delta = row.sum.convert_to<long double>() - row.main - row.secondary;
    r.max_abs_delta = std::max(r.max_abs_delta, std::fabs(row.delta));
    if (row.delta != 0) {
      all_zero = false;
      points.emplace_back(std::log(x), std::log(std::fabs(row.delta)));
    }
    r.rows.push_back(std::move(row));
  }
  r.exact_zero = all_zero;
  if (points.size() >= 2) {
    Eigen::Matrix<long double, Eigen::Dynamic, 2> a(points.size(), 2);
    Eigen::Matrix<long double, Eigen::Dynamic, 1> y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      a(i, 0) = points[i].first;
      a(i, 1) = 1;
      y(i) = points[i].second;
    }
    r.slope = a.colPivHouseholderQr().solve(y)(0);
  }
  return r;
}

void write_csv(std::ostream& out, const FitReport& r) {
  out << "x,sum,main,secondary,delta\n";
  char buf[128];
  for (const auto& row : r.rows) {
    out << row.x << ',' << row.sum.str();
    std::snprintf(buf, sizeof buf, ",%.6Lf,%.6Lf,%.6Lf\n", row.main, row.secondary, row.delta);
    out << buf;
  }
}

// ---------------------------------------------------------------------------

std::string to_string(MinElementsCheck::Status s) {
  switch (s) {
    case MinElementsCheck::Status::Pass: return "pass";
    case MinElementsCheck::Status::Fail: return "fail";
    case MinElementsCheck::Status::Inconclusive: return "inconclusive";
  }
  return {};
}

MinElementsCheck verify_min_elements(std::uint32_t m, std::uint64_t bound) {
  const ArithmeticFunction tau(MultiplicativeSpec::tau());
  MinElementsCheck out;
  out.m = m;
  out.bound = bound;
  if (m == 0) throw DomainError("verify_min_elements: m must be >= 1");
  auto n = tower_min(tau, m).to_u64();
  if (!n || *n > kDefaultScanLimit / 5 || bound < 5 * *n) {
    out.status = MinElementsCheck::Status::Inconclusive;
    out.detail = "bound " + std::to_string(bound) + " is below 5n with n = " + tower_min(tau, m).to_string();
    if (n && *n <= bound) out.elements = support_scan(tau, m, bound).elements;
    if (n) out.n = *n;
    return out;
  }
  out.n = *n;
  out.elements = support_scan(tau, m, bound).elements;
  for (auto e : out.elements) {
    if (e % *n != 0 || (e / *n) % 2 == 0) {
      out.first_other = e;
      break;
    }
  }
  // The two lowest elements r < r' of A(E^{m-1} tau).
  auto r = tower_min(tau, m - 1).to_u64();
  if (r && *r <= 1'000'000) {
    auto lower = support_scan(tau, m - 1, std::min<std::uint64_t>(3 * *r, kDefaultScanLimit)).elements;
    if (lower.size() >= 2 && lower[1] <= 1'000'000) {
      Integer three = mp::pow(Integer(3), static_cast<unsigned>(*r));
      Integer two = pow2(lower[1]);
      out.other_lower_bound = std::min(three, two);
    }
  }
  const std::vector<std::uint64_t> expect{*n, 3 * *n, 5 * *n};
  bool prefix = out.elements.size() >= 3 && std::equal(expect.begin(), expect.end(), out.elements.begin());
  if (!prefix) {
    out.status = MinElementsCheck::Status::Fail;
    out.detail = "support does not start with n, 3n, 5n";
    return out;
  }
  if (out.first_other && out.other_lower_bound && Integer(*out.first_other) < *out.other_lower_bound) {
    out.status = MinElementsCheck::Status::Fail;
    out.detail = "first other element lies below min{3^r, 2^r'}";
    return out;
  }
  out.status = MinElementsCheck::Status::Pass;
  out.detail = out.first_other ? "odd multiples of n up to " + std::to_string(*out.first_other)
                               : "odd multiples of n throughout the bound";
  return out;
}

}  // namespace expdiv
