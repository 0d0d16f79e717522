#include "expdiv/numeric.hpp"
#include "expdiv/zeta.hpp"

#include <cctype>

namespace expdiv {

std::string to_string(const Integer& z) { return z.str(); }

std::string to_string(const Rational& q) {
  Integer num = numerator(q);
  Integer den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Integer numerator(const Rational& q) { return mp::numerator(q); }
Integer denominator(const Rational& q) { return mp::denominator(q); }

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  if (i == text.size()) throw DomainError("malformed rational: '" + std::string(whole) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j])))
      throw DomainError("malformed rational: '" + std::string(whole) + "'");
  }
  std::string s(text);
  if (s[0] == '+') s.erase(0, 1);
  return Integer(s);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw DomainError("malformed rational: empty string");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash), whole);
    Integer den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw DomainError("malformed rational: zero denominator in '" + std::string(whole) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (int_part.empty() || int_part == "-" || int_part == "+") int_part = "0";
    if (frac_part.empty()) frac_part = "0";
    Integer ip = parse_integer(int_part, whole);
    Integer fp = parse_integer(frac_part, whole);
    if (frac_part.front() == '-' || frac_part.front() == '+')
      throw DomainError("malformed rational: '" + std::string(whole) + "'");
    Integer scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    Rational frac(fp, scale);
    Rational value = Rational(mp::abs(ip)) + frac;
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_integer(text, whole));
}

Integer pow2(std::uint64_t e) {
  Integer r = 1;
  mpz_mul_2exp(r.backend().data(), r.backend().data(), e);
  return r;
}

Rational pow(const Rational& base, int exponent) {
  if (exponent < 0) {
    if (base == 0) throw DomainError("zero to a negative power");
    return pow(Rational(1) / base, -exponent);
  }
  Rational result = 1;
  Rational b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return result;
}

}  // namespace expdiv

namespace expdiv {

const std::vector<Rational>& even_bernoulli(std::size_t count) {
  static const std::vector<Rational> table = [] {
    constexpr std::size_t kMax = 200;  // B_0..B_200
    std::vector<Rational> b(kMax + 1);
    b[0] = 1;
    for (std::size_t m = 1; m <= kMax; ++m) {
      // sum_{j=0}^{m} C(m+1, j) B_j = 0
      Rational acc = 0;
      Integer c = 1;  // C(m+1, 0)
      for (std::size_t j = 0; j < m; ++j) {
        acc += Rational(c) * b[j];
        c = c * Integer(m + 1 - j) / Integer(j + 1);
      }
      b[m] = -acc / Rational(Integer(m + 1));
    }
    std::vector<Rational> even;
    for (std::size_t k = 0; 2 * k <= kMax; ++k) even.push_back(b[2 * k]);
    return even;
  }();
  if (count > table.size()) throw DomainError("even_bernoulli: table limited to B_200");
  return table;
}

}  // namespace expdiv
