#include "expdiv/expairs.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <thread>

namespace expdiv {

ExponentPair ExponentPair::from_homogeneous(const ProjectivePoint<Rational>& v, bool epsilon) {
  if (v(2) == 0) throw DomainError("projective point at infinity has no finite exponent pair");
  return {v(0) / v(2), v(1) / v(2), epsilon};
}

bool ExponentPair::in_region() const {
  const Rational half(1, 2);
  return k >= 0 && k <= half && l >= half && l <= 1;
}

ExponentPair apply_process(Process step, const ExponentPair& pair) {
  return ExponentPair::from_homogeneous(process_matrix<Rational>(step) * pair.homogeneous(), pair.epsilon);
}

Seed Seed::identity() { return {"I", {Rational(0), Rational(1), false}}; }
Seed Seed::h05() { return {"H05", {Rational(32, 205), Rational(269, 410), true}}; }
Seed Seed::h87() { return {"H87", {Rational(2, 13), Rational(35, 52), true}}; }

Seed Seed::explicit_pair(const Rational& k, const Rational& l) {
  ExponentPair p{k, l, false};
  if (!p.in_region()) throw DomainError("seed (" + to_string(k) + "," + to_string(l) + ") is outside 0 <= k <= 1/2 <= l <= 1");
  return {"(" + to_string(k) + "," + to_string(l) + ")", p};
}

Seed Seed::named(const std::string& id) {
  if (id == "I") return identity();
  if (id == "H05") return h05();
  if (id == "H87") return h87();
  throw DomainError("unknown seed '" + id + "' (expected I, H05, H87 or (k,l))");
}

// ---------------------------------------------------------------------------
// Word grammar

namespace {

constexpr std::size_t kMaxWordSteps = 1'000'000;

class WordParser {
public:
  explicit WordParser(const std::string& text) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
  }

  ProcessWord parse() {
    ProcessWord w;
    w.steps = sequence(/*top=*/true);
    if (pos_ < s_.size()) w.seed = seed();
    if (pos_ != s_.size()) fail("trailing input");
    return w;
  }

private:
  std::vector<Process> sequence(bool top) {
    std::vector<Process> out;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      std::vector<Process> item;
      if (c == 'A' || c == 'B') {
        item.push_back(c == 'A' ? Process::A : Process::B);
        ++pos_;
      } else if (c == '(' && !(top && is_pair_seed())) {
        ++pos_;
        item = sequence(false);
        if (pos_ >= s_.size() || s_[pos_] != ')') fail("unbalanced parenthesis");
        ++pos_;
      } else {
        break;
      }
      std::size_t reps = exponent();
      if (out.size() + reps * item.size() > kMaxWordSteps) fail("word longer than " + std::to_string(kMaxWordSteps));
      for (std::size_t i = 0; i < reps; ++i) out.insert(out.end(), item.begin(), item.end());
    }
    return out;
  }

  std::size_t exponent() {
    if (pos_ >= s_.size() || s_[pos_] != '^') return 1;
    ++pos_;
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits after '^'");
    if (pos_ - start > 7) fail("exponent too large");
    return std::stoul(s_.substr(start, pos_ - start));
  }

  bool is_pair_seed() const {
    auto close = s_.find(')', pos_);
    auto comma = s_.find(',', pos_);
    auto open = s_.find('(', pos_ + 1);
    return comma != std::string::npos && comma < close && (open == std::string::npos || open > comma);
  }

  Seed seed() {
    if (s_[pos_] == '(') {
      auto comma = s_.find(',', pos_);
      auto close = s_.find(')', pos_);
      if (comma == std::string::npos || close == std::string::npos || comma > close) fail("malformed pair seed");
      Rational k = parse_rational(s_.substr(pos_ + 1, comma - pos_ - 1));
      Rational l = parse_rational(s_.substr(comma + 1, close - comma - 1));
      pos_ = close + 1;
      return Seed::explicit_pair(k, l);
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return Seed::named(s_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("word parse error at position " + std::to_string(pos_) + ": " + what);
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

ProcessWord ProcessWord::parse(const std::string& text) { return WordParser(text).parse(); }

std::string ProcessWord::steps_string() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size();) {
    std::size_t j = i;
    while (j < steps.size() && steps[j] == steps[i]) ++j;
    if (!out.empty()) out += ' ';
    out += steps[i] == Process::A ? 'A' : 'B';
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::string ProcessWord::to_string() const {
  std::string s = steps_string();
  return s.empty() ? seed.id : s + " " + seed.id;
}

ExponentPair eval_word(const ProcessWord& w) {
  ProjectivePoint<Rational> v = w.seed.pair.homogeneous();
  for (auto it = w.steps.rbegin(); it != w.steps.rend(); ++it) v = process_matrix<Rational>(*it) * v;
  return ExponentPair::from_homogeneous(v, w.seed.pair.epsilon);
}

// ---------------------------------------------------------------------------
// Closed forms

namespace {

void check_range(int r, PairVariant v) {
  int lo = v == PairVariant::TwoD ? 5 : 10;
  if (r < lo || r > 4096)
    throw DomainError("closed form needs " + std::to_string(lo) + " <= r <= 4096, got r = " + std::to_string(r));
}

}  // namespace

ProcessWord closed_form_word(int r, PairVariant v) {
  check_range(r, v);
  ProcessWord w;
  auto push = [&](Process p, int n) { w.steps.insert(w.steps.end(), static_cast<std::size_t>(n), p); };
  push(Process::A, r - 1);
  push(Process::B, 1);
  if (v == PairVariant::TwoD) {
    push(Process::A, r - 3);
    push(Process::B, 1);
    push(Process::A, 1);
    push(Process::B, 1);
  } else {
    push(Process::A, r - 2);
    push(Process::B, 1);
    push(Process::A, 1);
    push(Process::B, 1);
    push(Process::A, 2);
    push(Process::B, 1);
  }
  return w;
}

ExponentPair closed_form_pair(int r, PairVariant v) {
  check_range(r, v);
  const Integer P = pow2(static_cast<std::uint64_t>(r));
  const Integer R(r);
  if (v == PairVariant::TwoD) {
    Integer den = 2 * P * P - (2 * R + 4) * P + 4 * R;
    return {Rational(P - 2 * R, den), 1 - Rational(R * P - 2 * R * R + 2 * R - 4, den), false};
  }
  Integer den = 26 * P * P - (16 * R + 54) * P + 32 * R + 24;
  return {Rational(13 * P - 16 * R - 12, den), 1 - Rational(13 * R * P - 16 * R * R + 4 * R - 20, den), false};
}

Rational second_case_condition(const ExponentPair& pair, const Rational& m) {
  return 2 * pair.l - 2 * m * pair.k - 1;
}

FirstCaseRegime::FirstCaseRegime(const Rational& condition, const Rational& m)
    : DomainError("first-case regime, external to this artifact: 2l - 2mk - 1 = " + to_string(condition) +
                  " > 0 at m = " + to_string(m)),
      condition_(condition) {}

Rational theta_second_case(const ExponentPair& pair, const Rational& m) {
  if (m < 2) throw DomainError("theta_second_case: scale m must be >= 2");
  Rational c = second_case_condition(pair, m);
  if (c > 0) throw FirstCaseRegime(c, m);
  Rational den = m * pair.k - pair.l + 1;
  if (den <= 0) throw DomainError("theta_second_case: non-positive denominator mk - l + 1");
  return pair.k / den;
}

Rational theta_closed(int r, PairVariant v) {
  check_range(r, v);
  const Integer P = pow2(static_cast<std::uint64_t>(r));
  const Integer R(r);
  if (v == PairVariant::TwoD) return Rational(P - 2 * R, P * P - R * P - 2 * R * R + 2 * R - 4);
  Integer num = 26 * P * P - (29 * R + 41) * P + 16 * R * R + 12 * R + 32;
  Integer den = 26 * P * P * P - (16 * R + 41) * P * P + (24 * R - 3) * P + 16 * R + 12;
  return Rational(num, den);
}

// ---------------------------------------------------------------------------
// Search

Objective theta_one_m_objective(const Rational& m) {
  if (m < 2) throw DomainError("theta(1,m) objective needs m >= 2");
  return {"theta(1," + to_string(m) + ")", [m](const ExponentPair& p) -> std::optional<Rational> {
            if (second_case_condition(p, m) > 0) return std::nullopt;
            if (m * p.k - p.l + 1 <= 0) return std::nullopt;
            return theta_second_case(p, m);
          }};
}

namespace {

struct Node {
  ProcessWord word;
  ExponentPair pair;
  std::optional<Rational> value;
  std::string key;  // rendered word, for tie-breaks
};

bool word_before(const Node& a, const Node& b) {
  if (a.word.steps.size() != b.word.steps.size()) return a.word.steps.size() < b.word.steps.size();
  return a.key < b.key;
}

// Lower value first, infeasible last, then shorter / lexicographic word.
bool value_before(const Node& a, const Node& b) {
  if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
  if (a.value && *a.value != *b.value) return *a.value < *b.value;
  return word_before(a, b);
}

struct PairKey {
  Rational k, l;
  bool eps;
  bool operator<(const PairKey& o) const {
    if (k != o.k) return k < o.k;
    if (l != o.l) return l < o.l;
    return eps < o.eps;
  }
};

bool dominates(const ExponentPair& a, const ExponentPair& b) {
  return a.k <= b.k && a.l <= b.l && (a.k != b.k || a.l != b.l);
}

Node make_node(ProcessWord w, ExponentPair p, const Objective& obj) {
  Node n{std::move(w), std::move(p), std::nullopt, {}};
  n.value = obj.value(n.pair);
  n.key = n.word.to_string();
  return n;
}

// Non-dominated sorting layer for each node (0 = Pareto front).
std::vector<std::size_t> pareto_layers(const std::vector<Node>& nodes) {
  std::vector<std::size_t> layer(nodes.size(), 0);
  std::vector<bool> assigned(nodes.size(), false);
  std::size_t left = nodes.size();
  for (std::size_t current = 0; left > 0; ++current) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (assigned[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < nodes.size() && !dominated; ++j)
        dominated = !assigned[j] && j != i && dominates(nodes[j].pair, nodes[i].pair);
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) {
      assigned[i] = true;
      layer[i] = current;
    }
    left -= front.size();
  }
  return layer;
}

std::vector<Node> expand(const std::vector<Node>& frontier, const Objective& obj, unsigned threads) {
  std::vector<std::optional<Node>> slots(2 * frontier.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Node& parent = frontier[i];
      for (int s = 0; s < 2; ++s) {
        Process step = s == 0 ? Process::A : Process::B;
        if (step == Process::B && !parent.word.steps.empty() && parent.word.steps.front() == Process::B) continue;
        ProcessWord w;
        w.seed = parent.word.seed;
        w.steps.reserve(parent.word.steps.size() + 1);
        w.steps.push_back(step);
        w.steps.insert(w.steps.end(), parent.word.steps.begin(), parent.word.steps.end());
        slots[2 * i + s] = make_node(std::move(w), apply_process(step, parent.pair), obj);
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(frontier.size())));
  if (threads == 1) {
    work(0, frontier.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (frontier.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t b = t * chunk, e = std::min(frontier.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  std::vector<Node> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

}  // namespace

SearchResult search_word(const Objective& objective, const SearchOptions& options) {
  if (options.exhaustive && options.max_len > kMaxExhaustiveLength)
    throw DomainError("exhaustive search limited to max_len <= " + std::to_string(kMaxExhaustiveLength));
  if (!options.exhaustive && options.beam_width == 0) throw DomainError("beam width must be positive");
  if (options.seeds.empty()) throw DomainError("search needs at least one seed");

  SearchResult result;
  result.objective = objective.name;

  // Each distinct pair is kept once, under its best word; extensions of equal
  // pairs coincide, so this loses nothing.
  std::map<PairKey, Node> seen;
  auto admit = [&](std::vector<Node> level) {
    std::sort(level.begin(), level.end(), word_before);
    std::vector<Node> fresh;
    for (auto& n : level) {
      ++result.evaluated;
      PairKey key{n.pair.k, n.pair.l, n.pair.epsilon};
      if (seen.count(key)) continue;
      seen.emplace(key, n);
      fresh.push_back(std::move(n));
    }
    return fresh;
  };

  std::vector<Node> start;
  for (const auto& s : options.seeds) start.push_back(make_node(ProcessWord{{}, s}, s.pair, objective));
  std::vector<Node> frontier = admit(std::move(start));

  for (std::size_t len = 1; len <= options.max_len && !frontier.empty(); ++len) {
    frontier = admit(expand(frontier, objective, options.threads));
    if (!options.exhaustive && frontier.size() > options.beam_width) {
      auto layer = pareto_layers(frontier);
      std::vector<std::size_t> order(frontier.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (layer[a] != layer[b]) return layer[a] < layer[b];
        return value_before(frontier[a], frontier[b]);
      });
      std::vector<Node> kept;
      for (std::size_t i = 0; i < options.beam_width; ++i) kept.push_back(std::move(frontier[order[i]]));
      frontier = std::move(kept);
    }
  }

  std::vector<Node> feasible;
  for (auto& [key, n] : seen)
    if (n.value) feasible.push_back(n);
  if (feasible.empty()) {
    result.diagnostic = "no word up to length " + std::to_string(options.max_len) + " satisfies the condition of " +
                        objective.name;
    return result;
  }
  std::sort(feasible.begin(), feasible.end(), value_before);
  result.best = Candidate{feasible.front().word, feasible.front().pair, feasible.front().value};
  for (const auto& n : feasible) {
    bool dominated = std::any_of(feasible.begin(), feasible.end(),
                                 [&](const Node& o) { return dominates(o.pair, n.pair); });
    if (!dominated) result.pareto.push_back({n.word, n.pair, n.value});
  }
  std::sort(result.pareto.begin(), result.pareto.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pair.k != b.pair.k) return a.pair.k < b.pair.k;
    return a.pair.l < b.pair.l;
  });
  return result;
}

}  // namespace expdiv
