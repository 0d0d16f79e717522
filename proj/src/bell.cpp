#include "expdiv/bell.hpp"

#include "expdiv/eop.hpp"

#include <algorithm>
#include <sstream>

namespace expdiv {

ZetaWord::ZetaWord(std::vector<ZetaFactor> factors, std::optional<std::uint64_t> claimed_order)
    : claimed_order_(claimed_order) {
  std::sort(factors.begin(), factors.end(), [](const ZetaFactor& a, const ZetaFactor& b) { return a.scale < b.scale; });
  for (auto& f : factors) {
    if (f.scale == TowerInt(std::uint64_t(0))) throw DomainError("ZetaWord: scale must be positive");
    if (!factors_.empty() && factors_.back().scale == f.scale) {
      factors_.back().exponent += f.exponent;
      if (factors_.back().exponent == 0) factors_.pop_back();
      continue;
    }
    if (f.exponent != 0) factors_.push_back(std::move(f));
  }
}

long ZetaWord::exponent_at(const TowerInt& scale) const {
  for (const auto& f : factors_)
    if (f.scale == scale) return f.exponent;
  return 0;
}

ZetaWord ZetaWord::parse(const std::string& text) {
  std::vector<ZetaFactor> factors;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("ZetaWord::parse: expected scale:exponent, got '" + item + "'");
    try {
      std::uint64_t scale = std::stoull(item.substr(0, colon));
      long exponent = std::stol(item.substr(colon + 1));
      factors.push_back({TowerInt(scale), exponent});
    } catch (const std::logic_error&) {
      throw DomainError("ZetaWord::parse: malformed factor '" + item + "'");
    }
  }
  if (factors.empty()) throw DomainError("ZetaWord::parse: empty word");
  return ZetaWord(std::move(factors));
}

std::string ZetaWord::to_string() const {
  std::string s;
  for (const auto& f : factors_) {
    if (!s.empty()) s += ",";
    s += f.scale.to_string() + ":" + std::to_string(f.exponent);
  }
  return s;
}

ExactSeries local_series(const MultiplicativeSpec& f, Eigen::Index order, std::uint64_t p) {
  if (order < 0) throw DomainError("local_series: negative order");
  if (p == 0) {
    if (!f.prime_independent())
      throw DomainError("local_series: " + f.name() + " depends on the prime; pass an explicit p");
    p = 2;
  } else if (!is_prime(p)) {
    throw DomainError("local_series: " + std::to_string(p) + " is not prime");
  }
  ExactSeries::Coefficients c(order + 1);
  for (Eigen::Index n = 0; n <= order; ++n) c(n) = Rational(f.at_prime_power(p, static_cast<std::uint32_t>(n)));
  return ExactSeries(std::move(c));
}

GreedyFactorization greedy_factor(const ExactSeries& s) {
  if (s[0] != 1) throw DomainError("greedy_factor: constant coefficient must be 1");
  ExactSeries residual = s;
  std::vector<ZetaFactor> factors;
  for (Eigen::Index d = 1; d <= s.order(); ++d) {
    const Rational c = residual[d];
    if (c == 0) continue;
    if (denominator(c) != 1) throw DomainError("greedy_factor: non-integer coefficient at degree " + std::to_string(d));
    long e = numerator(c).convert_to<long>();
    residual.multiply_binomial(d, e);
    factors.push_back({TowerInt(std::uint64_t(d)), e});
  }
  return {ZetaWord(std::move(factors), static_cast<std::uint64_t>(s.order() + 1)), std::move(residual)};
}

ExpansionCheck verify_expansion(const MultiplicativeSpec& f, const ZetaWord& w, std::uint64_t claimed_order,
                                Eigen::Index order, std::uint64_t p) {
  if (claimed_order == 0) throw DomainError("verify_expansion: claimed residual order must be positive");
  order = std::max<Eigen::Index>(order, static_cast<Eigen::Index>(claimed_order));
  ExpansionCheck out;
  out.function = f.name();
  out.word = w;
  out.order = order;
  out.claimed_order = claimed_order;
  out.residual = local_series(f, order, p) / word_local_factor<Rational>(w, order);
  out.actual_residual_order = out.residual.first_nonzero_above_constant();
  out.pass = true;
  for (Eigen::Index n = 1; n < static_cast<Eigen::Index>(claimed_order); ++n) {
    if (out.residual[n] != 0) {
      out.pass = false;
      out.first_mismatch_degree = n;
      out.first_mismatch_value = out.residual[n];
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

TowerInt level_scale(std::uint32_t level) {
  return tower_min(ArithmeticFunction(MultiplicativeSpec::tau()), level);
}

std::optional<std::uint64_t> order_from(const TowerInt& n, std::uint64_t mult, std::uint64_t add) {
  auto v = n.to_u64();
  if (!v || *v > (std::uint64_t(1) << 40)) return std::nullopt;
  return *v * mult + add;
}

}  // namespace

ZetaWord toth_word(std::uint32_t k) {
  if (k < 2) throw DomainError("toth_word: k must be >= 2");
  return ZetaWord({{TowerInt(std::uint64_t(1)), 1}, {TowerInt(std::uint64_t(2)), long(k) - 1}}, 5);
}

ZetaWord tower_word(std::uint32_t level) {
  if (level < 2) throw DomainError("tower_word: level must be >= 2");
  TowerInt n = level_scale(level);
  return ZetaWord({{TowerInt(std::uint64_t(1)), 1},
                   {n, 1},
                   {n.plus_one(), -1},
                   {n.doubled(), -1},
                   {n.doubled().plus_one(), 1},
                   {n.times(3), 1}},
                  order_from(n, 3, 1));
}

ZetaWord tower_word_k(std::uint32_t level, std::uint32_t k) {
  if (level < 2) throw DomainError("tower_word_k: level must be >= 2");
  if (k < 2) throw DomainError("tower_word_k: k must be >= 2");
  TowerInt n = level_scale(level);
  long e = long(k) - 1;
  return ZetaWord({{TowerInt(std::uint64_t(1)), 1}, {n, e}, {n.plus_one(), -e}, {n.doubled(), -long(k) * e / 2}},
                  order_from(n, 2, 1));
}

ZetaWord gaussian_word() {
  return ZetaWord({{TowerInt(std::uint64_t(1)), 1}, {TowerInt(std::uint64_t(2)), 2}, {TowerInt(std::uint64_t(3)), -1}}, 5);
}

ZetaWord tail_pair_word(const TowerInt& n, long e) {
  if (e == 0) throw DomainError("tail_pair_word: exponent must be nonzero");
  return ZetaWord({{TowerInt(std::uint64_t(1)), 1}, {n, e}, {n.plus_one(), -e}}, order_from(n, 2, 0));
}

GeneralWord general_word(const ArithmeticFunction& f, std::uint32_t m) {
  M0Bound bound = m0_bound(f, 2);
  if (m < bound.m0)
    throw DomainError("general_word: m = " + std::to_string(m) + " is below m0 = " + std::to_string(bound.m0));
  const std::uint64_t nf = min_support(f);
  Integer value = evaluate(f, nf);
  Integer e = value - 1;
  if (mp::abs(e) > Integer(1) << 62) throw DomainError("general_word: exponent f(n(f)) - 1 out of range");

  GeneralWord out;
  out.n = tower_min(f, m);
  out.exponent = e.convert_to<long>();
  out.m0 = bound.m0;
  out.word = tail_pair_word(out.n, out.exponent);
  out.series_function = MultiplicativeSpec::e_power(f, m + 1);
  if (auto n = out.n.to_u64()) {
    EPowerEvaluator eval(f);
    Integer at_n = eval(m, *n);
    Integer at_next = eval(m, *n + 1);
    out.toth_hypothesis_holds = at_n == at_next && at_n == value;
  }
  return out;
}

std::optional<KnownWord> known_word(const MultiplicativeSpec& f) {
  const auto* ep = std::get_if<rule::EPower>(&f.rule());
  if (!ep) return std::nullopt;
  const auto* base = std::get_if<MultiplicativeSpec>(ep->base.get());
  if (base) {
    if (const auto* tk = std::get_if<rule::TauK>(&base->rule()); tk && tk->k >= 2) {
      if (ep->m == 1) return KnownWord{toth_word(tk->k), "toth"};
      if (ep->m >= 3) {
        if (tk->k == 2) return KnownWord{tower_word(ep->m - 1), "tower"};
        return KnownWord{tower_word_k(ep->m - 1, tk->k), "tower_k"};
      }
    }
    if (std::holds_alternative<rule::GaussTau>(base->rule()) && ep->m == 1) return KnownWord{gaussian_word(), "gaussian"};
  }
  if (ep->m < 2) return std::nullopt;
  try {
    return KnownWord{general_word(*ep->base, ep->m - 1).word, "general"};
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace expdiv
