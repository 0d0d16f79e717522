#include "expdiv/exponents.hpp"

#include "expdiv/arith.hpp"
#include "expdiv/eop.hpp"
#include "expdiv/expairs.hpp"
#include "expdiv/theta_kb_data.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace expdiv {

std::string ThetaTarget::to_string() const {
  switch (kind) {
    case ThetaKind::Dim: return "theta_" + param.str();
    case ThetaKind::OneM: return "theta(1," + param.str() + ")";
    case ThetaKind::OneMM: return "theta(1," + param.str() + "," + param.str() + ")";
  }
  return {};
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Literature: return "literature";
    case Provenance::PairDerived: return "pair-derived";
    case Provenance::Formula: return "formula";
    case Provenance::ExternalReference: return "external-reference";
  }
  return {};
}

namespace {

Provenance parse_provenance(const std::string& s) {
  if (s == "literature") return Provenance::Literature;
  if (s == "pair-derived") return Provenance::PairDerived;
  if (s == "formula") return Provenance::Formula;
  if (s == "external-reference") return Provenance::ExternalReference;
  throw DomainError("theta KB: unknown provenance '" + s + "'");
}

ThetaKind parse_kind(const std::string& s) {
  if (s == "dim") return ThetaKind::Dim;
  if (s == "one_m") return ThetaKind::OneM;
  if (s == "one_m_m") return ThetaKind::OneMM;
  throw DomainError("theta KB: unknown target kind '" + s + "'");
}

}  // namespace

ThetaKnowledgeBase ThetaKnowledgeBase::from_json(const std::string& text) {
  ThetaKnowledgeBase kb;
  try {
    auto doc = nlohmann::json::parse(text);
    kb.version_ = doc.at("version").get<int>();
    for (const auto& r : doc.at("records")) {
      ThetaBound b{{parse_kind(r.at("target").at("kind").get<std::string>()),
                    Integer(r.at("target").at("param").get<std::string>())},
                   parse_rational(r.at("value").get<std::string>())};
      b.epsilon = r.value("epsilon", false);
      b.rh_conditional = r.value("rh_conditional", false);
      b.provenance = parse_provenance(r.at("provenance").get<std::string>());
      b.source = r.value("source", "");
      b.witness = r.value("witness", "");
      b.witness_verified = r.value("witness_verified", false);
      b.note = r.value("note", "");
      if (kb.find(b.target)) throw DomainError("theta KB: duplicate record for " + b.target.to_string());
      kb.records_.push_back(std::move(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("theta KB: malformed JSON: ") + e.what());
  }
  return kb;
}

ThetaKnowledgeBase ThetaKnowledgeBase::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("theta KB: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

const ThetaKnowledgeBase& ThetaKnowledgeBase::builtin() {
  static const ThetaKnowledgeBase kb = from_json(detail::kThetaKbJson);
  return kb;
}

std::optional<ThetaBound> ThetaKnowledgeBase::find(const ThetaTarget& t) const {
  for (const auto& r : records_)
    if (r.target == t) return r;
  return std::nullopt;
}

std::vector<std::string> ThetaKnowledgeBase::rederive_mismatches() const {
  std::vector<std::string> out;
  for (const auto& r : records_) {
    if (r.provenance != Provenance::PairDerived || !r.witness_verified) continue;
    if (r.target.kind != ThetaKind::OneM) {
      out.push_back(r.target.to_string() + ": only theta(1,m) witnesses can be re-derived");
      continue;
    }
    try {
      ExponentPair p = eval_word(ProcessWord::parse(r.witness));
      Rational v = theta_second_case(p, Rational(r.target.param));
      if (v != r.value || p.epsilon != r.epsilon)
        out.push_back(r.target.to_string() + ": witness gives " + expdiv::to_string(v) + ", stored " +
                      expdiv::to_string(r.value));
    } catch (const DomainError& e) {
      out.push_back(r.target.to_string() + ": " + e.what());
    }
  }
  return out;
}

ThetaBound theta_k_bound(std::uint32_t k, const ThetaKnowledgeBase& kb) {
  if (k == 0) throw DomainError("theta_k_bound: k must be >= 1");
  ThetaTarget t{ThetaKind::Dim, Integer(k)};
  if (k == 1) {
    ThetaBound b{t, Rational(0)};
    b.provenance = Provenance::Formula;
    b.source = "sum_{n<=x} 1 = floor(x)";
    return b;
  }
  if (auto b = kb.find(t)) return *b;
  if (k < 4) throw DomainError("theta_k_bound: no record for " + t.to_string());
  ThetaBound b{t, Rational(k - 1, k + 2)};
  b.epsilon = true;
  b.provenance = Provenance::Formula;
  b.source = "(k-1)/(k+2), Titchmarsh Th. 12.3";
  return b;
}

const Rational& ExponentValue::exact() const {
  if (!value) throw DomainError("exponent " + expression + " is not materializable");
  return *value;
}

// ---------------------------------------------------------------------------

namespace {

TowerInt tau_scale(std::uint32_t m) { return tower_min(ArithmeticFunction(MultiplicativeSpec::tau()), m); }

std::optional<Integer> small_scale(const TowerInt& n) {
  if (auto v = n.to_u64()) return Integer(*v);
  return std::nullopt;
}

std::string theta_label(const ThetaBound& b) {
  std::string s = b.target.to_string() + " = " + to_string(b.value) + (b.epsilon ? "+eps" : "") + " [" +
                  to_string(b.provenance);
  if (!b.source.empty()) s += ": " + b.source;
  if (!b.witness.empty()) s += ", " + b.witness;
  return s + "]";
}

}  // namespace

Rational u_general(std::uint32_t k, const Integer& l, const ThetaKnowledgeBase& kb) {
  if (k < 2) throw DomainError("u_general: k must be >= 2");
  if (l < 2) throw DomainError("u_general: l must be >= 2");
  return Rational(1) / (Rational(l) + 1 - theta_k_bound(k - 1, kb).value);
}

ExponentValue u_general_tower(std::uint32_t k, std::uint32_t m, const ThetaKnowledgeBase& kb) {
  if (k < 2) throw DomainError("u_general: k must be >= 2");
  if (m < 1) throw DomainError("u_general_tower: m must be >= 1");
  ThetaBound th = theta_k_bound(k - 1, kb);
  TowerInt n = tau_scale(m);
  ExponentValue out;
  out.epsilon = th.epsilon;
  out.provenance.push_back("u_{k,l} = 1/(l+1-theta_{k-1}), l = " + n.to_string());
  out.provenance.push_back(theta_label(th));
  if (auto l = small_scale(n)) {
    out.value = u_general(k, *l, kb);
    out.expression = to_string(*out.value);
  } else {
    out.expression = "1/(" + n.to_string() + "+1" + (th.value == 0 ? "" : "-" + to_string(th.value)) + ")";
  }
  return out;
}

Rational u_bound_simple(std::uint32_t k, const Integer& l) {
  return Rational(Integer(k + 1), 3 + Integer(k + 1) * l);
}

Rational u_bound_classical(std::uint32_t k, const Integer& l) {
  return Rational(Integer(2 * k - 1), 3 + Integer(2 * k - 1) * l);
}

Rational beta_nowak(const Integer& a, const Integer& b, const Integer& c, const Rational& theta) {
  if (!(a >= 1 && a <= b && b < c && c < 2 * (a + b)))
    throw DomainError("beta_nowak: hypothesis a <= b < c < 2(a+b) fails for (" + a.str() + "," + b.str() + "," +
                      c.str() + ")");
  if (!(theta < Rational(1) / Rational(c)))
    throw DomainError("beta_nowak: theta = " + to_string(theta) + " is not below 1/c");
  return (1 - Rational(a) * theta) / (Rational(a + c) - 2 * Rational(a * c) * theta);
}

ExponentValue omega_exponent(const OmegaFamily& f) {
  ExponentValue out;
  switch (f.kind) {
    case OmegaFamily::Kind::ETauK:
      if (f.k <= 1) throw DomainError("omega_exponent: k must be >= 2");
      out.value = Rational(1) / (4 - Rational(2, f.k));
      out.expression = to_string(*out.value);
      out.provenance.push_back("1/(4-2/k), k = " + std::to_string(f.k));
      return out;
    case OmegaFamily::Kind::EmTau:
    case OmegaFamily::Kind::EmTauK: {
      if (f.m <= 1) throw DomainError("omega_exponent: m must be >= 2");
      if (f.k <= 1) throw DomainError("omega_exponent: k must be >= 2");
      TowerInt n = tau_scale(f.m);
      const Integer km1(f.k - 1);
      if (auto v = small_scale(n)) {
        out.value = Rational(km1, 2 * (1 + *v * km1));
        out.expression = to_string(*out.value);
      } else {
        out.expression = km1.str() + "/(2(1+" + km1.str() + "*" + n.to_string() + "))";
      }
      out.provenance.push_back(f.k == 2 ? "1/(2(n+1)), n = " + n.to_string()
                                        : "(k-1)/(2(1+n(k-1))), n = " + n.to_string());
      return out;
    }
  }
  return out;
}

std::pair<Rational, Rational> moment_exponents(std::uint32_t r) {
  if (r == 0) throw DomainError("moment_exponents: r must be >= 1");
  if (r > 4096) throw DomainError("moment_exponents: r must be <= 4096");
  Integer P = pow2(r);
  return {Rational(P + 1, 2 * P + 5), Rational(P + 1, 3 * (P + 2))};
}

// ---------------------------------------------------------------------------

namespace {

// theta(1,n) or theta(1,n,n) from the KB, else from the closed forms when
// n = 2^r with r in range.
std::optional<ThetaBound> theta_for_scale(ThetaKind kind, const TowerInt& n, std::uint32_t m,
                                          const ThetaKnowledgeBase& kb) {
  if (auto v = small_scale(n))
    if (auto b = kb.find({kind, *v})) return b;
  // n = n(E^m tau) = 2^r with r = n(E^{m-1} tau).
  auto r = tau_scale(m - 1).to_u64();
  PairVariant variant = kind == ThetaKind::OneM ? PairVariant::TwoD : PairVariant::ThreeD;
  std::uint64_t lo = kind == ThetaKind::OneM ? 5 : 10;
  if (!r || *r < lo || *r > 4096) return std::nullopt;
  ThetaBound b{{kind, Integer(0)}, theta_closed(static_cast<int>(*r), variant)};
  if (auto v = small_scale(n)) b.target.param = *v;
  b.provenance = Provenance::Formula;
  b.source = std::string(kind == ThetaKind::OneM ? "2d" : "3d") + " closed form at r = " + std::to_string(*r);
  b.witness = closed_form_word(static_cast<int>(*r), variant).to_string();
  b.witness_verified = kind == ThetaKind::OneM;
  return b;
}

}  // namespace

ExponentReport report(std::uint32_t m, std::uint32_t k, bool rh, const ThetaKnowledgeBase& kb) {
  if (m < 2) throw DomainError("report: level m must be >= 2");
  if (k < 2) throw DomainError("report: k must be >= 2");
  ExponentReport out;
  out.m = m;
  out.k = k;
  out.rh = rh;
  out.function = MultiplicativeSpec::e_power(ArithmeticFunction(MultiplicativeSpec::tau_k(k)), m + 1).name();
  out.scale = tau_scale(m);
  out.secondary_log_degree = k - 2;
  const std::string n = out.scale.to_string();
  out.main_term = k == 2 ? "C x + D x^(1/" + n + ")"
                         : "C x + x^(1/" + n + ") P(log x), deg P = " + std::to_string(k - 2);

  out.error = u_general_tower(k, m, kb);
  out.inputs.push_back(theta_k_bound(k - 1, kb));
  out.omega = omega_exponent(k == 2 ? OmegaFamily::em_tau(m) : OmegaFamily::em_tau_k(m, k));

  if (!rh) return out;
  if (k > 3) {
    out.error_rh_unavailable = "no theta(1,n,...,n) bound with " + std::to_string(k - 1) + " copies of n";
    return out;
  }
  ThetaKind kind = k == 2 ? ThetaKind::OneM : ThetaKind::OneMM;
  auto theta = theta_for_scale(kind, out.scale, m, kb);
  auto scale = small_scale(out.scale);
  if (!theta || !scale) {
    out.error_rh_unavailable = std::string("no theta(1,n") + (kind == ThetaKind::OneMM ? ",n" : "") +
                               ") bound at n = " + n;
    return out;
  }
  out.inputs.push_back(*theta);
  ExponentValue e;
  e.value = beta_nowak(1, *scale, *scale + 1, theta->value);
  e.expression = to_string(*e.value);
  e.epsilon = theta->epsilon;
  e.rh_conditional = true;
  e.provenance.push_back("(1-a theta)/(a+c-2ac theta), (a,b,c) = (1," + n + "," + (*scale + 1).str() + ")");
  e.provenance.push_back(theta_label(*theta));
  out.error_rh = std::move(e);
  return out;
}

}  // namespace expdiv
