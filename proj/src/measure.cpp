#include "ucfg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "ucfg/convrec.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/reductions.hpp"

namespace ucfg {

Rational word_measure(std::size_t length, int n) {
  return pow(make_rational(1, n + 1), static_cast<unsigned long>(length + 1));
}

Rational word_measure(const Word& w, int n) { return word_measure(w.size(), n); }

namespace {

using Matrix = std::vector<std::vector<Rational>>;

// Solves a x = b by elimination; a must be nonsingular.
std::vector<Rational> solve_dense(Matrix a, std::vector<Rational> b) {
  const std::size_t m = b.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) throw Error(ErrorKind::precondition, "singular measure system");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < m; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < m; ++c) b[c] /= a[c][c];
  return b;
}

// Strongly connected components, sinks first.
std::vector<std::vector<int>> components(const Automaton& a) {
  const int s = a.state_count();
  std::vector<int> index(static_cast<std::size_t>(s), -1), low(static_cast<std::size_t>(s), 0);
  std::vector<bool> on(static_cast<std::size_t>(s), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  for (int root = 0; root < s; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      auto& [q, pos] = frames.back();
      const auto& edges = a.out(q);
      if (pos < edges.size()) {
        int r = a.transitions()[static_cast<std::size_t>(edges[pos++])].to;
        auto ri = static_cast<std::size_t>(r);
        if (index[ri] < 0) {
          index[ri] = low[ri] = counter++;
          stack.push_back(r);
          on[ri] = true;
          frames.emplace_back(r, 0);
        } else if (on[ri]) {
          low[static_cast<std::size_t>(q)] = std::min(low[static_cast<std::size_t>(q)], index[ri]);
        }
        continue;
      }
      const int done = q;
      frames.pop_back();
      if (!frames.empty()) {
        auto parent = static_cast<std::size_t>(frames.back().first);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(done)]);
      }
      if (low[static_cast<std::size_t>(done)] == index[static_cast<std::size_t>(done)]) {
        std::vector<int> comp;
        int v;
        do {
          v = stack.back();
          stack.pop_back();
          on[static_cast<std::size_t>(v)] = false;
          comp.push_back(v);
        } while (v != done);
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

void require_unambiguous(const Automaton& a) {
  if (a.is_deterministic()) return;
  auto u = check_unambiguous_nfa(a);
  if (!u.unambiguous)
    throw Error(ErrorKind::not_unambiguous,
                "automaton is ambiguous on " + format_word(a.alphabet(), u.witness.value_or(Word{})));
}

bool decide(CompareOp op, const Rational& lo, const Rational& hi, const Rational& eps, ComparisonResult::Kind* out) {
  using K = ComparisonResult::Kind;
  switch (op) {
    case CompareOp::ge:
      if (lo >= eps) return *out = K::holds, true;
      if (hi < eps) return *out = K::fails, true;
      break;
    case CompareOp::gt:
      if (lo > eps) return *out = K::holds, true;
      if (hi <= eps) return *out = K::fails, true;
      break;
    case CompareOp::le:
      if (hi <= eps) return *out = K::holds, true;
      if (lo > eps) return *out = K::fails, true;
      break;
    case CompareOp::lt:
      if (hi < eps) return *out = K::holds, true;
      if (lo >= eps) return *out = K::fails, true;
      break;
  }
  return false;
}

void check_threshold(const Rational& eps) {
  if (eps < 0 || eps > 1) throw Error(ErrorKind::precondition, "threshold must lie in [0, 1]");
}

Grammar checked_grammar(const Grammar& g, const char* what) {
  if (!g.is_short_gnf()) throw Error(ErrorKind::not_short_gnf, std::string(what) + " needs a short-GNF grammar");
  if (!g.unambiguity().trusted())
    throw Error(ErrorKind::not_unambiguous, std::string(what) + " needs claimed or verified unambiguity");
  return trim(g).grammar;
}

// L(g) ∩ pΣ*, as a short-GNF grammar.
Grammar with_prefix(const Grammar& g, const Word& p) {
  const int n = g.alphabet().size();
  std::vector<std::string> names;
  std::vector<Transition> ts;
  for (std::size_t i = 0; i <= p.size(); ++i) names.push_back("p" + std::to_string(i));
  for (std::size_t i = 0; i < p.size(); ++i)
    ts.push_back({static_cast<int>(i), p[i], static_cast<int>(i) + 1, static_cast<int>(ts.size())});
  const int last = static_cast<int>(p.size());
  for (Letter a = 0; a < n; ++a) ts.push_back({last, a, last, static_cast<int>(ts.size())});
  return product_ucfg_dfa(g, Automaton(g.alphabet(), names, {0}, {last}, ts));
}

bool empty_language(const Grammar& trimmed) { return trimmed.productions().empty(); }

// Coin-flip sampler shared by both language kinds.
Measure sample(int n, std::uint64_t samples, std::uint64_t seed, const std::function<bool(const Word&)>& member) {
  constexpr std::size_t cap = 10000;
  constexpr double z = 2.5758293035489;  // two-sided 99%
  std::uint64_t mixed = seed + 0x9e3779b97f4a7c15ULL;
  mixed = (mixed ^ (mixed >> 30)) * 0xbf58476d1ce4e5b9ULL;
  mixed = (mixed ^ (mixed >> 27)) * 0x94d049bb133111ebULL;
  mixed ^= mixed >> 31;
  std::mt19937_64 rng(mixed);
  // uniform on [0, n] by rejection, identical across standard libraries
  const std::uint64_t range = static_cast<std::uint64_t>(n) + 1;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % range;
  auto draw = [&] {
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    return static_cast<int>(r % range);
  };

  Measure m;
  m.kind = Measure::Kind::estimate;
  m.seed = seed;
  std::uint64_t hits = 0, used = 0;
  Word w;
  for (std::uint64_t i = 0; i < samples; ++i) {
    w.clear();
    bool aborted = false;
    for (int c = draw(); c != n; c = draw()) {
      w.push_back(c);
      if (w.size() > cap) {
        aborted = true;
        break;
      }
    }
    if (aborted) {
      ++m.aborted;
      continue;
    }
    ++used;
    if (member(w)) ++hits;
  }
  m.samples = used;
  if (used == 0) {
    m.upper = 1;
    m.half_width = 0.5;
    return m;
  }
  const double N = static_cast<double>(used), p = static_cast<double>(hits) / N;
  const double denom = 1 + z * z / N;
  const double centre = (p + z * z / (2 * N)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / N + z * z / (4 * N * N)) / denom;
  m.mean = p;
  m.half_width = half;
  m.lower = std::max(0.0, centre - half);
  m.upper = std::min(1.0, centre + half);
  return m;
}

}  // namespace

Rational regular_measure_exact(const Automaton& input) {
  require_unambiguous(input);
  Automaton a = trim(input);
  const int n = a.alphabet().size();
  const Rational x = make_rational(1, n + 1);
  const auto s = static_cast<std::size_t>(a.state_count());
  // z_q = x [q accepting] + x sum_{q -> r} z_r; path counts of a trimmed UFA grow
  // at most like n^m, so every block is nonsingular.
  std::vector<Rational> z(s, 0);
  std::vector<int> where(s, -1);
  for (const auto& comp : components(a)) {
    const std::size_t m = comp.size();
    for (std::size_t i = 0; i < m; ++i) where[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);
    Matrix mat(m, std::vector<Rational>(m, 0));
    std::vector<Rational> rhs(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const int q = comp[i];
      mat[i][i] += 1;
      if (a.is_accepting(q)) rhs[i] += x;
      for (int id : a.out(q)) {
        int r = a.transitions()[static_cast<std::size_t>(id)].to;
        auto ri = static_cast<std::size_t>(r);
        if (where[ri] >= 0)
          mat[i][static_cast<std::size_t>(where[ri])] -= x;
        else
          rhs[i] += x * z[ri];
      }
    }
    auto sol = solve_dense(std::move(mat), std::move(rhs));
    for (std::size_t i = 0; i < m; ++i) z[static_cast<std::size_t>(comp[i])] = sol[i];
    for (int q : comp) where[static_cast<std::size_t>(q)] = -2;
  }
  Rational mu = 0;
  for (int q : a.initial()) mu += z[static_cast<std::size_t>(q)];
  return mu;
}

Measure ucfg_measure(const Grammar& input, const Rational& tol, int max_iter) {
  Grammar g = checked_grammar(input, "ucfg_measure");
  Measure m;
  m.kind = Measure::Kind::interval;
  if (empty_language(g)) {
    m.interval = {0, 0, true};
    m.status = "converged";
    return m;
  }
  const int n = g.alphabet().size();
  const Rational x = make_rational(1, n + 1);
  LfpOptions opt;
  opt.tol = tol * (n + 1);
  opt.max_iter = max_iter;
  opt.ceiling = n + 1;
  auto r = lfp_eval(gf_system(grammar_to_convrec(g), x), opt);
  if (r.status == LfpResult::Status::diverged)
    throw Error(ErrorKind::not_unambiguous, "derivation trees weigh more than 1; the grammar is ambiguous");
  const auto& y = r.values[0];
  Rational lo = std::min<Rational>(1, x * y.lo);
  Rational hi = y.upper_known ? std::min<Rational>(1, x * y.hi) : Rational(1);
  m.interval = {lo, hi, true};
  m.status = to_string(r.status);
  if (r.exact) m.status += " (exact)";
  return m;
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::le: return "<=";
    case CompareOp::lt: return "<";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

CompareOp parse_compare_op(std::string_view s) {
  if (s == "<=") return CompareOp::le;
  if (s == "<") return CompareOp::lt;
  if (s == ">") return CompareOp::gt;
  if (s == ">=") return CompareOp::ge;
  throw Error(ErrorKind::syntax, "unknown comparison operator '" + std::string(s) + "'");
}

const char* to_string(ComparisonResult::Kind k) {
  switch (k) {
    case ComparisonResult::Kind::holds: return "holds";
    case ComparisonResult::Kind::fails: return "fails";
    case ComparisonResult::Kind::undecided: return "undecided";
  }
  return "?";
}

ComparisonResult compare_measure(const Automaton& a, CompareOp op, const Rational& eps) {
  check_threshold(eps);
  ComparisonResult res;
  res.measure.kind = Measure::Kind::exact;
  res.measure.value = regular_measure_exact(a);
  decide(op, res.measure.value, res.measure.value, eps, &res.kind);
  if (eps == 1 && res.measure.value < 1) res.witness = inclusion_counterexample(universal_automaton(a.alphabet()), a);
  res.reason = "exact rational measure";
  return res;
}

ComparisonResult compare_measure(const Grammar& input, CompareOp op, const Rational& eps, const CompareConfig& cfg) {
  check_threshold(eps);
  Grammar g = checked_grammar(input, "compare_measure");
  ComparisonResult res;

  // Missing words of length m remove (n^m - f(m)) x^{m+1} from the mass; words
  // present give a lower bound in the same way.
  const int n = g.alphabet().size();
  const Rational x = make_rational(1, n + 1);
  Rational present = 0, cap = 1;
  if (empty_language(g)) {
    res.witness = Word{};
  } else if (cfg.search_bound >= 0) {
    auto f = short_gnf_length_counts(g, cfg.search_bound);
    Rational missing = 0, xm = x;
    BigInt all = 1;
    for (std::size_t m = 0; m < f.size(); ++m, xm *= x, all *= n) {
      if (f[m] > all)
        throw Error(ErrorKind::not_unambiguous,
                    to_string(f[m]) + " derivation trees of length " + std::to_string(m) + " exceed the word count");
      present += Rational(f[m]) * xm;
      missing += Rational(all - f[m]) * xm;
    }
    cap = 1 - missing;
    if (missing > 0 && eps == 1) {
      res.witness = find_missing_word(g, cfg.search_bound);
      if (res.witness && empty_language(with_prefix(g, *res.witness)))
        cap = std::min<Rational>(cap, 1 - pow(x, static_cast<unsigned long>(res.witness->size())));
    }
  }

  // Tighten the tolerance while the threshold stays inside the interval.
  for (Rational tol = cfg.tol;; tol *= tol) {
    res.measure = ucfg_measure(g, tol);
    auto& iv = res.measure.interval;
    iv.lo = std::max(iv.lo, present);
    iv.hi = std::min(iv.hi, cap);
    if (iv.lo > iv.hi)
      throw Error(ErrorKind::not_unambiguous,
                  "the derivation-weighted measure exceeds the word-count bound; the grammar is ambiguous");
    if (eps == 1 && op == CompareOp::ge && !res.witness && iv.hi >= 1) {
      res.reason = "measure 1 is not certified numerically; no missing word up to length " +
                   std::to_string(cfg.search_bound);
      return res;
    }
    if (decide(op, iv.lo, iv.hi, eps, &res.kind)) {
      res.reason = res.witness ? "missing word found" : "interval separates from the threshold";
      return res;
    }
    if (tol * tol < cfg.min_tol || iv.lo == iv.hi) break;
  }
  res.reason = "interval contains the threshold";
  return res;
}

Measure monte_carlo_measure(const Automaton& a, std::uint64_t samples, std::uint64_t seed) {
  return sample(a.alphabet().size(), samples, seed, [&](const Word& w) { return accepts(a, w); });
}

Measure monte_carlo_measure(const Grammar& g, std::uint64_t samples, std::uint64_t seed) {
  Recognizer member(g);
  return sample(g.alphabet().size(), samples, seed, [&](const Word& w) { return member(w); });
}

std::optional<Word> find_missing_word(const Grammar& input, int max_len) {
  Grammar g = checked_grammar(input, "find_missing_word");
  const int n = g.alphabet().size();
  if (max_len < 0) return std::nullopt;
  if (empty_language(g)) return Word{};
  auto f = short_gnf_length_counts(g, max_len);
  int len = -1;
  BigInt all = 1;
  for (int m = 0; m <= max_len; ++m, all *= n) {
    if (f[static_cast<std::size_t>(m)] > all)
      throw Error(ErrorKind::not_unambiguous, "length counts exceed the word counts at length " + std::to_string(m));
    if (f[static_cast<std::size_t>(m)] < all) {
      len = m;
      break;
    }
  }
  if (len < 0) return std::nullopt;

  auto contradiction = [] {
    return Error(ErrorKind::not_unambiguous, "prefix counts contradict the unambiguity claim");
  };
  Word w;
  for (int depth = 0; depth < len; ++depth) {
    const BigInt room = pow(BigInt(n), static_cast<unsigned long>(len - depth - 1));
    std::optional<Letter> pick;
    for (Letter a = 0; a < n; ++a) {
      Word p = w;
      p.push_back(a);
      Grammar gp = with_prefix(g, p);
      if (empty_language(gp)) {
        pick = a;
        break;
      }
      BigInt got = short_gnf_length_counts(gp, len)[static_cast<std::size_t>(len)];
      if (got > room) throw contradiction();
      if (got < room && !pick) pick = a;
    }
    if (!pick) throw contradiction();
    w.push_back(*pick);
    if (empty_language(with_prefix(g, w))) {
      w.resize(static_cast<std::size_t>(len), 0);
      break;
    }
  }
  if (count_derivations(g, w).count != 0) throw contradiction();
  return w;
}

}  // namespace ucfg
