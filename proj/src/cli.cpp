#include "expdiv/cli.hpp"

#include "expdiv/bell.hpp"
#include "expdiv/eop.hpp"
#include "expdiv/expairs.hpp"
#include "expdiv/exponents.hpp"
#include "expdiv/sums.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace expdiv::cli {

using nlohmann::json;
using expdiv::to_string;

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  return {};
}

namespace {

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "text") return OutputFormat::Text;
  throw UsageError("unknown output format '" + s + "' (json, csv or text)");
}

}  // namespace

std::string CommandPlan::to_json() const {
  json j;
  j["command"] = command;
  j["params"] = params;
  j["positional"] = positional;
  j["format"] = cli::to_string(format);
  j["output"] = output_path;
  return j.dump();
}

CommandPlan CommandPlan::from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    CommandPlan p;
    p.command = j.at("command").get<std::string>();
    p.params = j.at("params").get<std::map<std::string, std::string>>();
    p.positional = j.value("positional", "");
    p.format = parse_format(j.value("format", "json"));
    p.output_path = j.value("output", "");
    return p;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed plan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Function names

namespace {

class FunctionParser {
public:
  explicit FunctionParser(std::string s) : s_(std::move(s)) {}

  MultiplicativeSpec parse() {
    MultiplicativeSpec f = function();
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    if (pos_ != s_.size()) fail("trailing input");
    return f;
  }

private:
  MultiplicativeSpec function() {
    if (accept("E")) {
      std::uint32_t m = digits_or(1);
      if (m == 0) fail("E^0 is not a function name; write the base directly");
      return MultiplicativeSpec::e_power(ArithmeticFunction(function()), m);
    }
    if (accept("(")) {
      MultiplicativeSpec f = function();
      if (!accept("*e")) fail("expected '*e'");
      MultiplicativeSpec g = function();
      if (!accept(")")) fail("expected ')'");
      return exp_convolve(f, g);
    }
    if (accept("one")) return MultiplicativeSpec::one();
    if (accept("gauss")) return MultiplicativeSpec::gauss_tau();
    if (accept("mu_scaled")) return MultiplicativeSpec::mobius_scaled(positive_digits());
    if (accept("mu_power")) return MultiplicativeSpec::mobius_power(positive_digits());
    if (accept("tau")) {
      if (accept("(")) {
        std::vector<std::uint32_t> exps{positive_digits()};
        while (accept(",")) exps.push_back(positive_digits());
        if (!accept(")")) fail("expected ')'");
        return MultiplicativeSpec::tau_multi(std::move(exps));
      }
      std::uint32_t k = digits_or(2);
      if (k == 0) fail("tau0 is not defined");
      return MultiplicativeSpec::tau_k(k);
    }
    fail("unknown function");
  }

  bool accept(const std::string& t) {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    if (s_.compare(pos_, t.size(), t) != 0) return false;
    pos_ += t.size();
    return true;
  }

  std::uint32_t digits_or(std::uint32_t fallback) {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) return fallback;
    if (pos_ - start > 4) fail("number too large");
    return static_cast<std::uint32_t>(std::stoul(s_.substr(start, pos_ - start)));
  }

  std::uint32_t positive_digits() {
    std::size_t start = pos_;
    std::uint32_t v = digits_or(0);
    if (start == pos_ || v == 0) fail("expected a positive integer");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError("function name '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiplicativeSpec parse_function(const std::string& text) {
  try {
    return FunctionParser(text).parse();
  } catch (const UsageError&) {
    throw;
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Parameter validation helpers

namespace {

std::uint64_t as_uint(const std::string& key, const std::string& v, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t x = 0;
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
  } catch (const std::logic_error&) {
    throw UsageError("--" + key + ": expected an integer, got '" + v + "'");
  }
  if (x < lo || x > hi)
    throw UsageError("--" + key + ": " + v + " is outside " + std::to_string(lo) + ".." + std::to_string(hi));
  return x;
}

Rational as_rational(const std::string& key, const std::string& v) {
  try {
    return parse_rational(v);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": malformed rational '" + v + "'");
  }
}

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Seed> parse_seeds(const std::string& s) {
  std::vector<Seed> seeds;
  for (const auto& item : split_top_level(s)) {
    ProcessWord w = ProcessWord::parse(item);
    if (!w.steps.empty()) throw UsageError("--seeds: '" + item + "' is a word, not a seed");
    seeds.push_back(w.seed);
  }
  if (seeds.empty()) throw UsageError("--seeds: empty list");
  return seeds;
}

Rational parse_objective(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.rfind("theta(1,", 0) != 0 || t.back() != ')')
    throw UsageError("--objective: expected theta(1,m), got '" + s + "'");
  std::string inner = t.substr(8, t.size() - 9);
  if (inner.find(',') != std::string::npos)
    throw UsageError("--objective: theta(1,m,m) needs the three-dimensional formula, which is not implemented");
  Rational m = as_rational("objective", inner);
  if (m < 2) throw UsageError("--objective: m must be >= 2");
  return m;
}

std::uint64_t sum_bound() { return std::min<std::uint64_t>(kMaxSumBound, configured_sieve_bound()); }

std::vector<std::uint64_t> parse_checkpoints(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_top_level(s)) out.push_back(as_uint("checkpoints", item, 1, sum_bound()));
  if (out.empty()) throw UsageError("--checkpoints: empty list");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw UsageError("--checkpoints: values must be strictly increasing");
  return out;
}

const std::string* get(const CommandPlan& p, const std::string& key) {
  auto it = p.params.find(key);
  return it == p.params.end() ? nullptr : &it->second;
}

bool flag(const CommandPlan& p, const std::string& key) {
  auto v = get(p, key);
  return v && *v == "true";
}

std::string param_or(const CommandPlan& p, const std::string& key, const std::string& fallback) {
  auto v = get(p, key);
  return v ? *v : fallback;
}

SumConfig sum_config(const CommandPlan& p) {
  SumConfig cfg;
  if (auto c = get(p, "config")) {
    try {
      cfg = load_sum_config(*c);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  } else {
    cfg.checkpoints = geometric_checkpoints(1000, std::min<std::uint64_t>(10'000'000, sum_bound()), 2);
  }
  if (auto c = get(p, "checkpoints")) cfg.checkpoints = parse_checkpoints(*c);
  if (auto t = get(p, "threads")) cfg.options.threads = static_cast<unsigned>(as_uint("threads", *t, 1, 256));
  if (auto s = get(p, "shard-size")) cfg.options.shard_size = as_uint("shard-size", *s, 1, kMaxSumBound);
  if (auto d = get(p, "state-dir")) cfg.options.state_dir = *d;
  if (cfg.checkpoints.empty() || cfg.checkpoints.back() > sum_bound())
    throw UsageError("checkpoints must lie in 1.." + std::to_string(sum_bound()) +
                     " (EXPDIV_SIEVE_BOUND caps the range)");
  if (cfg.options.threads == 0) throw UsageError("threads must be positive");
  return cfg;
}

}  // namespace

void validate(const CommandPlan& p) {
  const std::string& c = p.command;
  auto check_function = [&] {
    auto f = get(p, "function");
    if (!f) throw UsageError(c + ": --function is required");
    return parse_function(*f);
  };
  if (p.format == OutputFormat::Csv && c != "sum run" && c != "sum fit")
    throw UsageError(c + ": csv output is only available for sum run and sum fit");

  if (c == "series factor" || c == "series verify") {
    MultiplicativeSpec f = check_function();
    if (auto o = get(p, "order")) as_uint("order", *o, 1, 4096);
    if (auto pr = get(p, "prime")) {
      if (!is_prime(as_uint("prime", *pr, 2, std::uint64_t(1) << 62))) throw UsageError("--prime: " + *pr + " is not prime");
    } else if (!f.prime_independent()) {
      throw UsageError(c + ": " + f.name() + " depends on the prime; pass --prime");
    }
    if (c == "series verify") {
      if (auto w = get(p, "word")) {
        try {
          ZetaWord::parse(*w);
        } catch (const DomainError& e) {
          throw UsageError(std::string("--word: ") + e.what());
        }
        if (!get(p, "claimed")) throw UsageError("series verify: --word needs --claimed");
      }
      if (auto t = get(p, "claimed")) as_uint("claimed", *t, 1, 4096);
    }
  } else if (c == "pair eval") {
    if (p.positional.empty()) throw UsageError("pair eval: a word is required");
    try {
      ProcessWord::parse(p.positional);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    if (auto m = get(p, "m"))
      if (as_rational("m", *m) < 2) throw UsageError("--m must be >= 2");
  } else if (c == "pair search") {
    auto o = get(p, "objective");
    if (!o) throw UsageError("pair search: --objective is required");
    parse_objective(*o);
    try {
      parse_seeds(param_or(p, "seeds", "I"));
    } catch (const DomainError& e) {
      throw UsageError(std::string("--seeds: ") + e.what());
    }
    bool exhaustive = flag(p, "exhaustive");
    as_uint("max-len", param_or(p, "max-len", "12"), 0, exhaustive ? kMaxExhaustiveLength : 200);
    as_uint("beam-width", param_or(p, "beam-width", "512"), 1, 1'000'000);
    as_uint("threads", param_or(p, "threads", "1"), 1, 256);
  } else if (c == "theta table") {
    as_uint("r-max", param_or(p, "r-max", "14"), 5, 64);
  } else if (c == "exponent report") {
    auto m = get(p, "m");
    if (!m) throw UsageError("exponent report: --m is required");
    as_uint("m", *m, 2, 64);
    as_uint("k", param_or(p, "k", "2"), 2, 64);
  } else if (c == "sum run" || c == "sum fit") {
    MultiplicativeSpec f = check_function();
    sum_config(p);
    if (c == "sum fit") {
      if (auto w = get(p, "word")) {
        try {
          ZetaWord::parse(*w);
        } catch (const DomainError& e) {
          throw UsageError(std::string("--word: ") + e.what());
        }
      } else if (!known_word(f) && !f.prime_independent()) {
        throw UsageError("sum fit: no known word for " + f.name() + "; pass --word");
      }
      if (auto s = get(p, "scale")) as_uint("scale", *s, 2, 4096);
      if (auto d = get(p, "log-degree")) as_uint("log-degree", *d, 0, 8);
      as_uint("digits", param_or(p, "digits", "8"), 1, 15);
    }
  } else if (c == "support scan") {
    MultiplicativeSpec f = check_function();
    as_uint("m", param_or(p, "m", "0"), 0, 16);
    auto b = get(p, "bound");
    if (!b) throw UsageError("support scan: --bound is required");
    as_uint("bound", *b, 1, kDefaultScanLimit);
    if (flag(p, "verify-min") && f.name() != "tau") throw UsageError("--verify-min applies to tau only");
  } else {
    throw UsageError("unknown command '" + c + "'");
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct OptionSpec {
  std::string name;  // without dashes
  bool is_flag;
  std::string help;
};

struct CommandSpec {
  CommandSpec(std::string g, std::string v, std::string h, std::vector<OptionSpec> o, std::string pos = {})
      : group(std::move(g)), verb(std::move(v)), help(std::move(h)), options(std::move(o)), positional(std::move(pos)) {}
  std::string group, verb, help;
  std::vector<OptionSpec> options;
  std::string positional;  // name, empty when none
};

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {"series", "factor", "Greedy zeta factorization of a local series",
       {{"function", false, "function name, e.g. E3tau"},
        {"order", false, "series order (default 32)"},
        {"prime", false, "prime for prime-dependent functions"}}},
      {"series", "verify", "Check a zeta word against a local series",
       {{"function", false, "function name"},
        {"word", false, "word as scale:exponent,... (default: the known word)"},
        {"claimed", false, "claimed residual order (with --word)"},
        {"order", false, "series order (default: the claimed order)"},
        {"prime", false, "prime for prime-dependent functions"}}},
      {"pair", "eval", "Evaluate an exponent-pair word",
       {{"m", false, "also compute theta(1,m) by the second-case formula"}},
       "word"},
      {"pair", "search", "Search process words for an objective",
       {{"objective", false, "theta(1,m)"},
        {"seeds", false, "seeds, comma separated (default I)"},
        {"max-len", false, "maximum word length (default 12)"},
        {"beam-width", false, "beam width (default 512)"},
        {"exhaustive", true, "enumerate every word"},
        {"threads", false, "worker threads (default 1)"}}},
      {"theta", "table", "Theta knowledge base and closed forms",
       {{"kb", false, "knowledge base JSON file (default: built in)"},
        {"r-max", false, "largest r for the closed forms (default 14)"}}},
      {"exponent", "report", "Exponents for E^{m+1} tau_k at level m",
       {{"m", false, "level m >= 2"},
        {"k", false, "k >= 2 (default 2)"},
        {"rh", true, "include RH-conditional exponents"},
        {"kb", false, "knowledge base JSON file (default: built in)"}}},
      {"sum", "run", "Exact partial sums at checkpoints",
       {{"function", false, "function name"},
        {"checkpoints", false, "comma-separated x values"},
        {"config", false, "key=value file with the checkpoint schedule"},
        {"threads", false, "worker threads"},
        {"shard-size", false, "sieve shard length"},
        {"state-dir", false, "directory for resumable shard files"}}},
      {"sum", "fit", "Main terms and error fit",
       {{"function", false, "function name"},
        {"checkpoints", false, "comma-separated x values"},
        {"config", false, "key=value file with the checkpoint schedule"},
        {"threads", false, "worker threads"},
        {"shard-size", false, "sieve shard length"},
        {"state-dir", false, "directory for resumable shard files"},
        {"word", false, "zeta word (default: the known word)"},
        {"scale", false, "secondary pole scale b (term x^{1/b})"},
        {"log-degree", false, "fit x^{1/b} P(log x) with this degree"},
        {"digits", false, "precision of the constants (default 8)"}}},
      {"support", "scan", "Support of E^m f up to a bound",
       {{"function", false, "function name"},
        {"m", false, "number of E applications (default 0)"},
        {"bound", false, "scan bound"},
        {"verify-min", true, "check the n, 3n, 5n pattern (tau only)"}}},
  };
  return specs;
}

}  // namespace

ParseOutcome parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential divisor functions: zeta words, exponent pairs and partial sums", "expdiv"};
  app.require_subcommand(1);
  std::string format = "json", output;
  app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--output", output, "write to a file instead of standard output");

  const auto& specs = command_specs();
  std::vector<std::map<std::string, std::string>> values(specs.size());
  std::vector<std::map<std::string, bool>> flags(specs.size());
  std::vector<std::string> positional(specs.size());
  std::vector<CLI::App*> leaves(specs.size());
  std::map<std::string, CLI::App*> groups;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    CLI::App*& g = groups[s.group];
    if (!g) {
      g = app.add_subcommand(s.group);
      g->require_subcommand(1);
      g->fallthrough();
    }
    CLI::App* leaf = g->add_subcommand(s.verb, s.help);
    leaf->fallthrough();
    leaves[i] = leaf;
    for (const auto& o : s.options) {
      if (o.is_flag) leaf->add_flag("--" + o.name, flags[i][o.name], o.help);
      else leaf->add_option("--" + o.name, values[i][o.name], o.help);
    }
    if (!s.positional.empty()) leaf->add_option(s.positional, positional[i], s.positional)->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
  }

  CommandPlan plan;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!leaves[i]->parsed()) continue;
    plan.command = specs[i].group + " " + specs[i].verb;
    for (const auto& o : specs[i].options) {
      if (o.is_flag) {
        if (flags[i][o.name]) plan.params[o.name] = "true";
      } else if (leaves[i]->count("--" + o.name)) {
        plan.params[o.name] = values[i][o.name];
      }
    }
    plan.positional = positional[i];
  }
  try {
    plan.format = parse_format(format);
    plan.output_path = output;
    validate(plan);
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return {std::nullopt, kExitUsage};
  }
  return {plan, kExitOk};
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string decimal(long double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", digits, v);
  return buf;
}

json rational_json(const Rational& q) { return to_string(q); }

json word_json(const ZetaWord& w) {
  json factors = json::array();
  for (const auto& f : w.factors()) factors.push_back({{"scale", f.scale.to_string()}, {"exponent", f.exponent}});
  json j{{"factors", factors}, {"text", w.to_string()}};
  j["claimed_residual_order"] = w.claimed_order() ? json(*w.claimed_order()) : json(nullptr);
  return j;
}

json pair_json(const ExponentPair& p) {
  return {{"k", rational_json(p.k)},
          {"l", rational_json(p.l)},
          {"epsilon", p.epsilon},
          {"k_approx", decimal(to_long_double(p.k))},
          {"l_approx", decimal(to_long_double(p.l))}};
}

json series_json(const ExactSeries& s) {
  json a = json::array();
  for (Eigen::Index i = 0; i <= s.order(); ++i) a.push_back(to_string(s[i]));
  return a;
}

json theta_bound_json(const ThetaBound& b) {
  json j{{"target", b.target.to_string()},
         {"value", rational_json(b.value)},
         {"approx", decimal(to_long_double(b.value))},
         {"epsilon", b.epsilon},
         {"rh_conditional", b.rh_conditional},
         {"provenance", to_string(b.provenance)}};
  if (!b.source.empty()) j["source"] = b.source;
  if (!b.witness.empty()) {
    j["witness"] = b.witness;
    j["witness_verified"] = b.witness_verified;
  }
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

json exponent_json(const ExponentValue& e) {
  json j{{"expression", e.expression},
         {"epsilon", e.epsilon},
         {"rh_conditional", e.rh_conditional},
         {"provenance", e.provenance}};
  if (e.value) {
    j["value"] = rational_json(*e.value);
    j["approx"] = decimal(to_long_double(*e.value));
  } else {
    j["value"] = nullptr;
  }
  return j;
}

const ThetaKnowledgeBase& knowledge_base(const CommandPlan& p, std::optional<ThetaKnowledgeBase>& storage) {
  if (auto path = get(p, "kb")) {
    storage = ThetaKnowledgeBase::from_file(*path);
    return *storage;
  }
  return ThetaKnowledgeBase::builtin();
}

struct Result {
  int code = kExitOk;
  json body;
  std::string text;  // preformatted text or csv, used when non-empty
};

// ---------------------------------------------------------------------------
// Commands

Result series_factor(const CommandPlan& p) {
  MultiplicativeSpec f = parse_function(*get(p, "function"));
  auto order = static_cast<Eigen::Index>(as_uint("order", param_or(p, "order", "32"), 1, 4096));
  std::uint64_t prime = get(p, "prime") ? as_uint("prime", *get(p, "prime"), 2, std::uint64_t(1) << 62) : 0;
  ExactSeries s = local_series(f, order, prime);
  GreedyFactorization g = greedy_factor(s);
  Result r;
  r.body = {{"command", p.command}, {"function", f.name()}, {"order", order}, {"word", word_json(g.word)}};
  r.body["prime"] = prime ? json(prime) : json(nullptr);
  r.body["series"] = series_json(s);
  return r;
}

Result series_verify(const CommandPlan& p) {
  MultiplicativeSpec f = parse_function(*get(p, "function"));
  ZetaWord word;
  std::string family = "explicit";
  if (auto w = get(p, "word")) {
    word = ZetaWord::parse(*w);
    word.set_claimed_order(as_uint("claimed", *get(p, "claimed"), 1, 4096));
  } else {
    auto known = known_word(f);
    if (!known) throw UsageError("series verify: no known word for " + f.name() + "; pass --word and --claimed");
    word = known->word;
    family = known->family;
    if (auto t = get(p, "claimed")) word.set_claimed_order(as_uint("claimed", *t, 1, 4096));
  }
  if (!word.claimed_order()) throw UsageError("series verify: the word's residual order is not materializable");
  if (*word.claimed_order() > 4096) throw UsageError("series verify: claimed residual order above 4096");
  Eigen::Index order = get(p, "order") ? static_cast<Eigen::Index>(as_uint("order", *get(p, "order"), 1, 4096)) : 0;
  std::uint64_t prime = get(p, "prime") ? as_uint("prime", *get(p, "prime"), 2, std::uint64_t(1) << 62) : 0;
  ExpansionCheck c = verify_expansion(f, word, *word.claimed_order(), order, prime);
  Result r;
  r.code = c.pass ? kExitOk : kExitFailure;
  r.body = {{"command", p.command},
            {"function", c.function},
            {"family", family},
            {"word", word_json(word)},
            {"order", c.order},
            {"claimed_residual_order", c.claimed_order},
            {"verified", c.pass}};
  r.body["prime"] = prime ? json(prime) : json(nullptr);
  r.body["residual_order"] = c.actual_residual_order ? json(*c.actual_residual_order) : json(nullptr);
  r.body["first_mismatch_degree"] = c.first_mismatch_degree ? json(*c.first_mismatch_degree) : json(nullptr);
  r.body["first_mismatch_value"] =
      c.first_mismatch_value ? json(to_string(*c.first_mismatch_value)) : json(nullptr);
  r.body["residual"] = series_json(c.residual);
  return r;
}

Result pair_eval(const CommandPlan& p) {
  ProcessWord w = ProcessWord::parse(p.positional);
  ExponentPair pair = eval_word(w);
  Result r;
  r.body = {{"command", p.command}, {"word", w.to_string()}, {"pair", pair_json(pair)}, {"in_region", pair.in_region()}};
  if (auto m = get(p, "m")) {
    Rational mm = as_rational("m", *m);
    Rational cond = second_case_condition(pair, mm);
    json t{{"m", rational_json(mm)}, {"condition", rational_json(cond)}};
    try {
      Rational th = theta_second_case(pair, mm);
      t["theta"] = rational_json(th);
      t["approx"] = decimal(to_long_double(th));
      t["regime"] = "second-case";
    } catch (const FirstCaseRegime& e) {
      t["theta"] = nullptr;
      t["regime"] = "first-case";
      t["message"] = e.what();
    }
    r.body["theta"] = t;
  }
  return r;
}

json candidate_json(const Candidate& c) {
  json j{{"word", c.word.to_string()}, {"pair", pair_json(c.pair)}};
  j["value"] = c.value ? rational_json(*c.value) : json(nullptr);
  if (c.value) j["approx"] = decimal(to_long_double(*c.value));
  return j;
}

Result pair_search(const CommandPlan& p) {
  Rational m = parse_objective(*get(p, "objective"));
  SearchOptions o;
  o.seeds = parse_seeds(param_or(p, "seeds", "I"));
  o.exhaustive = flag(p, "exhaustive");
  o.max_len = as_uint("max-len", param_or(p, "max-len", "12"), 0, o.exhaustive ? kMaxExhaustiveLength : 200);
  o.beam_width = as_uint("beam-width", param_or(p, "beam-width", "512"), 1, 1'000'000);
  o.threads = static_cast<unsigned>(as_uint("threads", param_or(p, "threads", "1"), 1, 256));
  SearchResult s = search_word(theta_one_m_objective(m), o);
  Result r;
  r.code = s.best ? kExitOk : kExitFailure;
  json pareto = json::array();
  for (const auto& c : s.pareto) pareto.push_back(candidate_json(c));
  r.body = {{"command", p.command},
            {"objective", s.objective},
            {"mode", o.exhaustive ? "exhaustive" : "beam"},
            {"max_len", o.max_len},
            {"evaluated", s.evaluated},
            {"pareto", pareto}};
  r.body["best"] = s.best ? candidate_json(*s.best) : json(nullptr);
  if (!s.diagnostic.empty()) r.body["diagnostic"] = s.diagnostic;
  return r;
}

Result theta_table(const CommandPlan& p) {
  std::optional<ThetaKnowledgeBase> storage;
  const ThetaKnowledgeBase& kb = knowledge_base(p, storage);
  int r_max = static_cast<int>(as_uint("r-max", param_or(p, "r-max", "14"), 5, 64));
  Result r;
  json records = json::array();
  for (const auto& b : kb.records()) records.push_back(theta_bound_json(b));
  auto mismatches = kb.rederive_mismatches();
  bool ok = mismatches.empty();
  json closed = json::array();
  std::ostringstream text;
  text << std::left << std::setw(24) << "target" << std::setw(30) << "value" << std::setw(14) << "approx"
       << "provenance\n";
  for (const auto& b : kb.records())
    text << std::setw(24) << b.target.to_string() << std::setw(30) << (to_string(b.value) + (b.epsilon ? "+eps" : ""))
         << std::setw(14) << decimal(to_long_double(b.value), 8) << to_string(b.provenance)
         << (b.witness.empty() ? "" : "  " + b.witness) << "\n";
  for (PairVariant v : {PairVariant::TwoD, PairVariant::ThreeD}) {
    int lo = v == PairVariant::TwoD ? 5 : 10;
    for (int rr = lo; rr <= r_max; ++rr) {
      Rational th = theta_closed(rr, v);
      Integer P = pow2(static_cast<std::uint64_t>(rr));
      Rational bound = v == PairVariant::TwoD ? Rational(1) / Rational(P + rr) : Rational(1) / Rational(P + 1);
      bool below = th < bound;
      ok = ok && below;
      std::string target = v == PairVariant::TwoD ? "theta(1,2^" + std::to_string(rr) + ")"
                                                  : "theta(1,2^" + std::to_string(rr) + ",2^" + std::to_string(rr) + ")";
      closed.push_back({{"variant", v == PairVariant::TwoD ? "2d" : "3d"},
                        {"r", rr},
                        {"target", target},
                        {"value", rational_json(th)},
                        {"approx", decimal(to_long_double(th))},
                        {"bound", rational_json(bound)},
                        {"below_bound", below}});
      text << std::setw(24) << target << std::setw(30) << ("closed form r=" + std::to_string(rr)) << std::setw(14)
           << decimal(to_long_double(th), 8) << (below ? "formula" : "formula, BOUND FAILS") << "\n";
    }
  }
  r.code = ok ? kExitOk : kExitFailure;
  r.body = {{"command", p.command},
            {"kb_version", kb.version()},
            {"records", records},
            {"closed_forms", closed},
            {"rederive_mismatches", mismatches}};
  if (p.format == OutputFormat::Text) r.text = text.str();
  return r;
}

Result exponent_report(const CommandPlan& p) {
  std::optional<ThetaKnowledgeBase> storage;
  const ThetaKnowledgeBase& kb = knowledge_base(p, storage);
  auto m = static_cast<std::uint32_t>(as_uint("m", *get(p, "m"), 2, 64));
  auto k = static_cast<std::uint32_t>(as_uint("k", param_or(p, "k", "2"), 2, 64));
  bool rh = flag(p, "rh");
  ExponentReport rep = report(m, k, rh, kb);
  Result r;
  json inputs = json::array();
  for (const auto& b : rep.inputs) inputs.push_back(theta_bound_json(b));
  r.body = {{"command", p.command},
            {"m", m},
            {"k", k},
            {"rh", rh},
            {"function", rep.function},
            {"scale", rep.scale.to_string()},
            {"main_term", rep.main_term},
            {"secondary_log_degree", rep.secondary_log_degree},
            {"error", exponent_json(rep.error)},
            {"omega", exponent_json(rep.omega)},
            {"inputs", inputs}};
  if (rh) {
    r.body["error_rh"] = rep.error_rh ? exponent_json(*rep.error_rh) : json(nullptr);
    if (!rep.error_rh_unavailable.empty()) r.body["error_rh_unavailable"] = rep.error_rh_unavailable;
  }
  if (p.format == OutputFormat::Text) {
    std::ostringstream t;
    auto row = [&](const std::string& key, const std::string& value) {
      t << std::left << std::setw(20) << key << value << "\n";
    };
    row("function", rep.function);
    row("scale", rep.scale.to_string());
    row("main term", rep.main_term);
    row("error exponent", rep.error.expression + (rep.error.epsilon ? " + eps" : ""));
    if (rh) {
      if (rep.error_rh)
        row("error (RH)", rep.error_rh->expression + (rep.error_rh->epsilon ? " + eps" : ""));
      else
        row("error (RH)", "unavailable: " + rep.error_rh_unavailable);
    }
    row("omega exponent", rep.omega.expression);
    for (const auto& b : rep.inputs) row("input", b.target.to_string() + " = " + to_string(b.value) + " [" + to_string(b.provenance) + "]");
    r.text = t.str();
  }
  return r;
}

Result sum_run(const CommandPlan& p) {
  MultiplicativeSpec f = parse_function(*get(p, "function"));
  SumConfig cfg = sum_config(p);
  CheckpointSums cs = checkpoint_sums(f, cfg.checkpoints, cfg.options);
  Result r;
  json rows = json::array();
  std::ostringstream csv;
  csv << "x,sum\n";
  for (std::size_t i = 0; i < cs.checkpoints.size(); ++i) {
    rows.push_back({{"x", cs.checkpoints[i]}, {"sum", cs.sums[i].str()}});
    csv << cs.checkpoints[i] << "," << cs.sums[i].str() << "\n";
  }
  r.body = {{"command", p.command},
            {"function", cs.function},
            {"checkpoints", rows},
            {"shards_computed", cs.shards_computed},
            {"shards_loaded", cs.shards_loaded}};
  if (p.format == OutputFormat::Csv) r.text = csv.str();
  return r;
}

std::string predicted_exponent(const MultiplicativeSpec& f, const std::string& family) {
  const auto* ep = std::get_if<rule::EPower>(&f.rule());
  if (!ep) return {};
  const auto* base = std::get_if<MultiplicativeSpec>(ep->base.get());
  const auto* tk = base ? std::get_if<rule::TauK>(&base->rule()) : nullptr;
  if (!tk) return {};
  if (family == "toth") return to_string(u_general(tk->k, 2));
  if (family == "tower" || family == "tower_k") return report(ep->m - 1, tk->k, false).error.expression;
  return {};
}

Result sum_fit(const CommandPlan& p) {
  MultiplicativeSpec f = parse_function(*get(p, "function"));
  SumConfig cfg = sum_config(p);
  int digits = static_cast<int>(as_uint("digits", param_or(p, "digits", "8"), 1, 15));

  ZetaWord word;
  std::string family = "explicit";
  if (auto w = get(p, "word")) {
    word = ZetaWord::parse(*w);
  } else if (auto known = known_word(f)) {
    word = known->word;
    family = known->family;
  } else {
    word = greedy_word(f, 64);
    family = "greedy";
  }

  EulerConstants<long double> ec = euler_constants<long double>(f, word, digits);
  MainTerms terms;
  terms.mean_a = ec.mean_a.value;

  // Secondary pole: the lowest scale above 1 with a positive exponent.
  long secondary_exponent = 0;
  if (auto s = get(p, "scale")) {
    terms.scale = as_uint("scale", *s, 2, 4096);
    secondary_exponent = word.exponent_at(TowerInt(terms.scale));
  } else {
    for (const auto& fac : word.factors()) {
      auto a = fac.scale.to_u64();
      if (a && *a > 1 && fac.exponent > 0) {
        terms.scale = *a;
        secondary_exponent = fac.exponent;
        break;
      }
    }
  }
  std::optional<EulerValue<long double>> mean_b;
  if (auto d = get(p, "log-degree")) {
    terms.fit_log_degree = static_cast<unsigned>(as_uint("log-degree", *d, 0, 8));
  } else if (secondary_exponent == 1) {
    mean_b = secondary_constant<long double>(f, word, terms.scale, digits);
    terms.mean_b = mean_b->value;
  } else if (secondary_exponent > 1) {
    terms.fit_log_degree = static_cast<unsigned>(secondary_exponent - 1);
  }

  CheckpointSums cs = checkpoint_sums(f, cfg.checkpoints, cfg.options);
  FitReport fit = fit_error_exponent(cs, terms, predicted_exponent(f, family));

  Result r;
  json rows = json::array();
  for (const auto& row : fit.rows)
    rows.push_back({{"x", row.x},
                    {"sum", row.sum.str()},
                    {"main", decimal(row.main, 15)},
                    {"secondary", decimal(row.secondary, 10)},
                    {"delta", decimal(row.delta, 10)}});
  r.body = {{"command", p.command},
            {"function", fit.function},
            {"family", family},
            {"word", word_json(word)},
            {"mean_a", decimal(ec.mean_a.value, digits)},
            {"mean_a_tail_bound", decimal(ec.mean_a.tail_bound, 3)},
            {"mean_a_prime_limit", ec.mean_a.prime_limit},
            {"residual_order", ec.residual_order},
            {"scale", terms.scale},
            {"rows", rows},
            {"max_abs_delta", decimal(fit.max_abs_delta, 10)},
            {"exact_zero", fit.exact_zero},
            {"predicted_exponent", fit.predicted_exponent}};
  r.body["c_f"] = ec.c_f ? json(decimal(ec.c_f->value, digits)) : json(nullptr);
  r.body["mean_b"] = mean_b ? json(decimal(mean_b->value, digits)) : json(nullptr);
  r.body["slope"] = fit.slope ? json(decimal(*fit.slope, 6)) : json(nullptr);
  json poly = json::array();
  for (auto c : fit.fitted_log_poly) poly.push_back(decimal(c, 10));
  r.body["fitted_log_poly"] = poly;
  if (p.format == OutputFormat::Csv) {
    std::ostringstream csv;
    write_csv(csv, fit);
    r.text = csv.str();
  }
  return r;
}

Result support(const CommandPlan& p) {
  MultiplicativeSpec f = parse_function(*get(p, "function"));
  auto m = static_cast<std::uint32_t>(as_uint("m", param_or(p, "m", "0"), 0, 16));
  auto bound = as_uint("bound", *get(p, "bound"), 1, kDefaultScanLimit);
  Result r;
  if (flag(p, "verify-min")) {
    MinElementsCheck c = verify_min_elements(m, bound);
    r.code = c.status == MinElementsCheck::Status::Fail ? kExitFailure : kExitOk;
    r.body = {{"command", p.command}, {"function", f.name()}, {"m", m},          {"bound", bound},
              {"n", c.n},             {"elements", c.elements}, {"status", to_string(c.status)},
              {"detail", c.detail}};
    r.body["first_other"] = c.first_other ? json(*c.first_other) : json(nullptr);
    r.body["other_lower_bound"] = c.other_lower_bound ? json(c.other_lower_bound->str()) : json(nullptr);
    return r;
  }
  SupportProfile s = support_scan(ArithmeticFunction(f), m, bound);
  r.body = {{"command", p.command}, {"function", s.function}, {"m", m}, {"bound", bound}, {"elements", s.elements}};
  return r;
}

void emit(const CommandPlan& p, const Result& r, std::ostream& out) {
  std::string payload = !r.text.empty() ? r.text : r.body.dump(p.format == OutputFormat::Text ? 2 : -1) + "\n";
  if (p.output_path.empty()) {
    out << payload;
    return;
  }
  std::filesystem::path path(p.output_path), tmp(p.output_path + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary);
    f << payload;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

int execute(const CommandPlan& plan, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<Result(const CommandPlan&)>> handlers = {
      {"series factor", series_factor}, {"series verify", series_verify},   {"pair eval", pair_eval},
      {"pair search", pair_search},     {"theta table", theta_table},       {"exponent report", exponent_report},
      {"sum run", sum_run},             {"sum fit", sum_fit},               {"support scan", support},
  };
  try {
    validate(plan);
    Result r = handlers.at(plan.command)(plan);
    emit(plan, r, out);
    return r.code;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseOutcome o = parse(argc, argv, out, err);
  if (!o.plan) return o.exit_code;
  return execute(*o.plan, out, err);
}

}  // namespace expdiv::cli
