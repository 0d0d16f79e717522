#include "expdiv/tower.hpp"

#include <cmath>

namespace expdiv {

namespace {

bool is_power_of_two(const Integer& v) {
  return v > 0 && mpz_popcount(v.backend().data()) == 1;
}

std::uint64_t bit_length(const Integer& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.backend().data(), 2);
}

Integer shifted(const Integer& v, std::uint64_t bits) {
  Integer r;
  mpz_mul_2exp(r.backend().data(), v.backend().data(), bits);
  return r;
}

const Integer kSmallLimit = pow2(62);

}  // namespace

TowerInt::TowerInt(Integer exact) : exact_(std::move(exact)) {
  if (exact_ < 0) throw DomainError("TowerInt holds natural numbers only");
}

TowerInt::TowerInt(std::shared_ptr<const TowerInt> exponent, Integer mult, Integer add)
    : exact_(0), exponent_(std::move(exponent)), mult_(std::move(mult)), add_(std::move(add)) {}

TowerInt TowerInt::pow2(const TowerInt& e, std::uint64_t digit_bound) {
  if (e.is_exact()) {
    // 2^e has floor(e log10 2) + 1 digits.
    if (auto small = e.to_u64(); small && double(*small) * std::log10(2.0) + 1 <= double(digit_bound))
      return TowerInt(expdiv::pow2(*small));
  }
  return TowerInt(std::make_shared<const TowerInt>(e), Integer(1), Integer(0));
}

const Integer& TowerInt::exact() const {
  if (!is_exact()) throw DomainError("TowerInt " + to_string() + " is not materialized");
  return exact_;
}

std::optional<std::uint64_t> TowerInt::to_u64() const {
  if (!is_exact() || bit_length(exact_) > 64) return std::nullopt;
  return exact_.convert_to<std::uint64_t>();
}

TowerInt TowerInt::times(std::uint64_t k) const {
  if (is_exact()) return TowerInt(Integer(exact_ * k));
  if (k == 0) return TowerInt(Integer(0));
  Integer mult = mult_ * k, add = add_ * k;
  if (mult >= kSmallLimit || mp::abs(add) >= kSmallLimit) throw DomainError("TowerInt: multiplier overflow");
  return TowerInt(exponent_, std::move(mult), std::move(add));
}

TowerInt TowerInt::plus_one() const { return *this + 1; }

TowerInt TowerInt::operator+(std::int64_t small) const {
  if (is_exact()) {
    Integer v = exact_ + small;
    if (v < 0) throw DomainError("TowerInt holds natural numbers only");
    return TowerInt(std::move(v));
  }
  Integer add = add_ + small;
  if (mp::abs(add) >= kSmallLimit) throw DomainError("TowerInt: offset overflow");
  return TowerInt(exponent_, mult_, std::move(add));
}

std::uint32_t TowerInt::height() const {
  if (!is_exact()) return 1 + exponent_->height();
  if (exact_ > expdiv::pow2(64) && is_power_of_two(exact_))
    return 1 + TowerInt(Integer(bit_length(exact_) - 1)).height();
  return 0;
}

Integer TowerInt::base() const {
  if (!is_exact()) return exponent_->base();
  if (exact_ > expdiv::pow2(64) && is_power_of_two(exact_)) return TowerInt(Integer(bit_length(exact_) - 1)).base();
  return exact_;
}

std::string TowerInt::to_string() const {
  if (is_exact()) {
    if (exact_ > expdiv::pow2(64) && is_power_of_two(exact_))
      return "2^" + TowerInt(Integer(bit_length(exact_) - 1)).to_string();
    return exact_.str();
  }
  std::string inner = exponent_->to_string();
  bool wrap = inner.find_first_not_of("0123456789") != std::string::npos;
  std::string s = (mult_ == 1 ? "" : mult_.str() + "*") + "2^" + (wrap ? "(" + inner + ")" : inner);
  if (add_ > 0) s += "+" + add_.str();
  if (add_ < 0) s += add_.str();
  return s;
}

std::optional<Integer> small_difference(const TowerInt& a, const TowerInt& b) {
  if (a.is_exact() && b.is_exact()) {
    Integer d = b.exact_ - a.exact_;
    if (mp::abs(d) < kSmallLimit) return d;
    return std::nullopt;
  }
  if (a.is_exact() != b.is_exact()) return std::nullopt;
  if (*a.exponent_ == *b.exponent_ && a.mult_ == b.mult_) return b.add_ - a.add_;
  return std::nullopt;
}

namespace {

// Boost numbers have no <=>; without this the implicit TowerInt conversion
// would recurse.
std::strong_ordering cmp(const Integer& x, const Integer& y) {
  int c = x.compare(y);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering operator<=>(const TowerInt& a, const TowerInt& b) {
  if (a.is_exact() && b.is_exact()) return cmp(a.exact_, b.exact_);

  if (a.is_exact() != b.is_exact()) {
    const TowerInt& ex = a.is_exact() ? a : b;
    const TowerInt& sym = a.is_exact() ? b : a;
    // sym >= 2^E - |add| with |add| < 2^62; exact < 2^L.
    std::uint64_t L = bit_length(ex.exact_);
    std::strong_ordering exact_vs_sym = std::strong_ordering::less;
    if (*sym.exponent_ <= TowerInt(Integer(L + 64))) {
      std::uint64_t e = *sym.exponent_->to_u64();
      Integer materialized = shifted(sym.mult_, e) + sym.add_;
      exact_vs_sym = cmp(ex.exact_, materialized);
    }
    return a.is_exact() ? exact_vs_sym : (0 <=> exact_vs_sym);
  }

  auto d = small_difference(*a.exponent_, *b.exponent_);
  if (d && mp::abs(*d) <= 64) {
    std::int64_t shift = d->convert_to<std::int64_t>();
    Integer lead_a = shift < 0 ? shifted(a.mult_, std::uint64_t(-shift)) : a.mult_;
    Integer lead_b = shift > 0 ? shifted(b.mult_, std::uint64_t(shift)) : b.mult_;
    if (lead_a != lead_b) return cmp(lead_a, lead_b);
    return cmp(a.add_, b.add_);
  }
  return *a.exponent_ <=> *b.exponent_;
}

}  // namespace expdiv
