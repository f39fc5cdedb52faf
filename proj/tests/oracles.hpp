#pragma once

// Brute-force reference implementations used only by the tests.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

#include "ucfg/grammar.hpp"
#include "ucfg/rational.hpp"

namespace oracle {

using ucfg::BigInt;
using ucfg::Grammar;
using ucfg::Word;

struct Cyclic : std::runtime_error {
  Cyclic() : std::runtime_error("cyclic derivation") {}
};

// Top-down memoised tree counting straight from the production bodies.
// Throws Cyclic when a nonterminal re-enters itself on the same span with a
// nonzero remaining factor (infinitely many trees).
class TreeCounter {
 public:
  TreeCounter(const Grammar& g, const Word& w) : g_(g), w_(w) {}

  BigInt count() { return nt(g_.start(), 0, static_cast<int>(w_.size())); }

 private:
  BigInt nt(int x, int i, int j) {
    auto key = std::make_tuple(x, i, j);
    auto it = nt_memo_.find(key);
    if (it != nt_memo_.end()) {
      if (!it->second) throw Cyclic();
      return *it->second;
    }
    nt_memo_[key] = std::nullopt;
    BigInt total = 0;
    const auto& prods = g_.productions();
    for (std::size_t p = 0; p < prods.size(); ++p)
      if (prods[p].head == x) total += body(static_cast<int>(p), 0, i, j);
    nt_memo_[key] = total;
    return total;
  }

  BigInt body(int p, int k, int i, int j) {
    const auto& b = g_.productions()[static_cast<std::size_t>(p)].body;
    if (k == static_cast<int>(b.size())) return i == j ? 1 : 0;
    auto key = std::make_tuple(p, k, i, j);
    auto it = body_memo_.find(key);
    if (it != body_memo_.end()) return it->second;
    BigInt total = 0;
    const auto& s = b[static_cast<std::size_t>(k)];
    for (int m = i; m <= j; ++m) {
      if (s.terminal) {
        if (m == i + 1 && w_[static_cast<std::size_t>(i)] == s.index) total += body(p, k + 1, m, j);
        continue;
      }
      BigInt rest = body(p, k + 1, m, j);
      if (rest == 0) continue;
      total += nt(s.index, i, m) * rest;
    }
    body_memo_[key] = total;
    return total;
  }

  const Grammar& g_;
  const Word& w_;
  std::map<std::tuple<int, int, int>, std::optional<BigInt>> nt_memo_;
  std::map<std::tuple<int, int, int, int>, BigInt> body_memo_;
};

inline BigInt trees(const Grammar& g, const Word& w) { return TreeCounter(g, w).count(); }

// Some word has infinitely many trees iff, after trimming, X =>+ X through
// bodies whose other symbols are all nullable.
inline bool infinitely_ambiguous(const Grammar& input) {
  Grammar g = ucfg::trim(input).grammar;
  const auto n = static_cast<std::size_t>(g.nonterminal_count());
  std::vector<bool> nullable(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions()) {
      bool all = true;
      for (const auto& s : p.body) all = all && !s.terminal && nullable[static_cast<std::size_t>(s.index)];
      if (all && !nullable[static_cast<std::size_t>(p.head)]) nullable[static_cast<std::size_t>(p.head)] = changed = true;
    }
  }
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& p : g.productions())
    for (std::size_t k = 0; k < p.body.size(); ++k) {
      if (p.body[k].terminal) continue;
      bool rest = true;
      for (std::size_t m = 0; m < p.body.size(); ++m)
        if (m != k) rest = rest && !p.body[m].terminal && nullable[static_cast<std::size_t>(p.body[m].index)];
      if (rest) reach[static_cast<std::size_t>(p.head)][static_cast<std::size_t>(p.body[k].index)] = true;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return true;
  return false;
}

// Random grammar over {a, b} with up to four nonterminals.
inline Grammar random_grammar(std::mt19937_64& rng, int max_nt = 4, int max_body = 3) {
  std::uniform_int_distribution<int> nts(1, max_nt);
  const int n = nts(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('S' + i)));
  std::vector<ucfg::Production> prods;
  std::uniform_int_distribution<int> count(1, 3), len(0, max_body), sym(0, n + 1);
  for (int x = 0; x < n; ++x) {
    int c = count(rng);
    for (int k = 0; k < c; ++k) {
      ucfg::Production p{x, {}};
      int l = len(rng);
      for (int i = 0; i < l; ++i) {
        int s = sym(rng);
        p.body.push_back(s < 2 ? ucfg::Symbol::t(s) : ucfg::Symbol::nt(s - 2));
      }
      prods.push_back(p);
    }
  }
  return Grammar(ucfg::Alphabet::from_chars("ab"), names, 0, prods);
}

// Dyck membership by bracket counting (a opens, b closes).
inline bool dyck(const Word& w) {
  int depth = 0;
  for (int c : w) {
    depth += c == 0 ? 1 : -1;
    if (depth < 0) return false;
  }
  return depth == 0;
}

// Random short-GNF grammar over {a, b}; most heads use each letter at most once.
inline Grammar random_short_gnf(std::mt19937_64& rng, int max_nt = 6) {
  const int n = std::uniform_int_distribution<int>(1, max_nt)(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('S' + i)));
  std::vector<ucfg::Production> prods;
  std::uniform_int_distribution<int> nt(0, n - 1), rules(0, 3);
  std::bernoulli_distribution coin(0.5), simple(0.75);
  for (int x = 0; x < n; ++x) {
    if (coin(rng)) prods.push_back({x, {}});
    int c = rules(rng);
    bool s = simple(rng);
    for (int k = 0; k < c; ++k) {
      int a = s ? k : static_cast<int>(coin(rng));
      if (a > 1) break;
      prods.push_back({x, {ucfg::Symbol::t(a), ucfg::Symbol::nt(nt(rng)), ucfg::Symbol::nt(nt(rng))}});
    }
  }
  return Grammar(ucfg::Alphabet::from_chars("ab"), names, 0, prods);
}

// Span table for short-GNF grammars: T[X][i][j] over w[i..j), letters consumed
// left to right. Counts saturate at 2^62.
inline std::uint64_t short_gnf_trees(const Grammar& g, const Word& w) {
  constexpr std::uint64_t cap = std::uint64_t(1) << 62;
  const int n = static_cast<int>(w.size());
  const int k = g.nonterminal_count();
  auto at = [n](int i, int j) { return static_cast<std::size_t>(i * (n + 1) + j); };
  std::vector<std::uint64_t> t(static_cast<std::size_t>(k * (n + 1) * (n + 1)), 0);
  auto cell = [&](int x, int i, int j) -> std::uint64_t& { return t[static_cast<std::size_t>(x) * at(n, n + 1) + at(i, j)]; };
  for (int len = 0; len <= n; ++len)
    for (int i = 0; i + len <= n; ++i) {
      int j = i + len;
      for (const auto& p : g.productions()) {
        auto& c = cell(p.head, i, j);
        if (p.body.empty()) {
          if (len == 0) c = std::min(cap, c + 1);
          continue;
        }
        if (len == 0 || w[static_cast<std::size_t>(i)] != p.body[0].index) continue;
        for (int m = i + 1; m <= j; ++m) {
          std::uint64_t y = cell(p.body[1].index, i + 1, m), z = cell(p.body[2].index, m, j);
          if (y == 0 || z == 0) continue;
          c = (y > cap / z) ? cap : std::min(cap, c + y * z);
        }
      }
    }
  return cell(g.start(), 0, n);
}

struct LengthCensus {
  std::vector<BigInt> words;  // members of each length
  BigInt max_trees = 0;
};

// Exhaustive per-word tree counts for all words of length <= N.
inline LengthCensus census(const Grammar& g, int N) {
  LengthCensus c;
  const int sigma = g.alphabet().size();
  for (int n = 0; n <= N; ++n) {
    BigInt members = 0;
    Word w(static_cast<std::size_t>(n), 0);
    while (true) {
      BigInt t = g.is_short_gnf() ? BigInt(static_cast<unsigned long>(short_gnf_trees(g, w))) : trees(g, w);
      if (t > 0) ++members;
      if (t > c.max_trees) c.max_trees = t;
      int i = n - 1;
      while (i >= 0 && w[static_cast<std::size_t>(i)] == sigma - 1) w[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++w[static_cast<std::size_t>(i)];
    }
    c.words.push_back(members);
  }
  return c;
}

}  // namespace oracle

#include "ucfg/automaton.hpp"
#include "ucfg/regex.hpp"

namespace oracle {

// Accepting runs by explicit path enumeration.
inline BigInt runs(const ucfg::Automaton& a, const Word& w) {
  BigInt total = 0;
  std::function<void(int, std::size_t)> go = [&](int q, std::size_t i) {
    if (i == w.size()) {
      if (a.is_accepting(q)) total += 1;
      return;
    }
    for (const auto& t : a.transitions())
      if (t.from == q && t.letter == w[i]) go(t.to, i + 1);
  };
  for (int q : a.initial()) go(q, 0);
  return total;
}

inline ucfg::Automaton random_nfa(std::mt19937_64& rng, int max_states, int sigma = 2, double density = 0.3) {
  std::uniform_int_distribution<int> ns(1, max_states);
  std::bernoulli_distribution coin(density), half(0.5);
  const int n = ns(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("q" + std::to_string(i));
  std::vector<int> init, acc;
  for (int q = 0; q < n; ++q) {
    if (q == 0 || coin(rng)) init.push_back(q);
    if (half(rng)) acc.push_back(q);
  }
  std::vector<ucfg::Transition> ts;
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < sigma; ++c)
      for (int q = 0; q < n; ++q)
        if (coin(rng)) ts.push_back({p, c, q, 0});
  std::string letters = "abcdefgh";
  return ucfg::Automaton(ucfg::Alphabet::from_chars(letters.substr(0, static_cast<std::size_t>(sigma))), names, init, acc, ts);
}

inline ucfg::Automaton random_dfa(std::mt19937_64& rng, int max_states, int sigma = 2, double fill = 0.8) {
  std::uniform_int_distribution<int> ns(1, max_states);
  std::bernoulli_distribution has(fill), half(0.5);
  const int n = ns(rng);
  std::uniform_int_distribution<int> st(0, n - 1);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("d" + std::to_string(i));
  std::vector<int> acc;
  for (int q = 0; q < n; ++q)
    if (half(rng)) acc.push_back(q);
  std::vector<ucfg::Transition> ts;
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < sigma; ++c)
      if (has(rng)) ts.push_back({p, c, st(rng), 0});
  std::string letters = "abcdefgh";
  return ucfg::Automaton(ucfg::Alphabet::from_chars(letters.substr(0, static_cast<std::size_t>(sigma))), names, {0}, acc, ts);
}

// Backtracking regex matcher (boolean), independent of the position automaton.
inline bool matches(const ucfg::Regex& e, const Word& w) {
  using K = ucfg::Regex::Kind;
  std::function<bool(const ucfg::Regex&, std::size_t, const std::function<bool(std::size_t)>&)> m =
      [&](const ucfg::Regex& r, std::size_t i, const std::function<bool(std::size_t)>& k) -> bool {
    switch (r.kind()) {
      case K::empty: return false;
      case K::epsilon: return k(i);
      case K::letter: return i < w.size() && w[i] == r.letter() && k(i + 1);
      case K::alt: return m(r.left(), i, k) || m(r.right(), i, k);
      case K::concat: return m(r.left(), i, [&](std::size_t j) { return m(r.right(), j, k); });
      case K::star:
        if (k(i)) return true;
        return m(r.left(), i, [&](std::size_t j) { return j > i && m(r, j, k); });
    }
    return false;
  };
  return m(e, 0, [&](std::size_t j) { return j == w.size(); });
}


// Accepted paths per length by forward propagation; bounds the measure of a
// UFA between the partial sum and the partial sum plus the tail of Σ*.
using ucfg::Rational;
struct SeriesBounds {
  Rational lo, hi;
};
inline SeriesBounds measure_series(const ucfg::Automaton& a, int N) {
  const int n = a.alphabet().size();
  const Rational x = ucfg::make_rational(1, n + 1);
  std::vector<BigInt> cur(static_cast<std::size_t>(a.state_count()), 0);
  for (int q : a.initial()) cur[static_cast<std::size_t>(q)] += 1;
  Rational sum = 0, xm = x;
  for (int m = 0; m <= N; ++m, xm *= x) {
    BigInt acc = 0;
    for (int q : a.accepting()) acc += cur[static_cast<std::size_t>(q)];
    sum += Rational(acc) * xm;
    std::vector<BigInt> next(cur.size(), 0);
    for (const auto& t : a.transitions()) next[static_cast<std::size_t>(t.to)] += cur[static_cast<std::size_t>(t.from)];
    cur = std::move(next);
  }
  // words longer than N weigh at most (n/(n+1))^{N+1} in total
  return {sum, sum + ucfg::pow(ucfg::make_rational(n, n + 1), static_cast<unsigned long>(N + 1))};
}

// X_0 <- a, X_{i+1} <- X_i X_i; Y_0 <- eps, Y_{i+1} <- Y_i | X_i Y_i; start X_n or Y_n.
inline std::string doubling_family(int n, char which) {
  std::string out = "alphabet: a\nstart: ";
  out += which;
  out += std::to_string(n) + "\nunambiguity: claimed\n";
  for (int i = 0; i <= n; ++i) {
    auto s = std::to_string(i), p = std::to_string(i - 1);
    out += "X" + s + " -> " + (i == 0 ? std::string("a") : "X" + p + " X" + p) + "\n";
    out += "Y" + s + " -> " + (i == 0 ? std::string("eps") : "Y" + p + " | X" + p + " Y" + p) + "\n";
  }
  return out;
}

}  // namespace oracle

namespace oracle {

// Balanced parentheses, known head symbols, declared variables, one check-sat.
inline bool well_formed_smt(const std::string& text, std::string* why) {
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      toks.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' && text[j] != ')') ++j;
      toks.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  static const std::set<std::string> heads = {"set-logic", "declare-fun", "assert", "check-sat", "get-model", "exit",
                                              "<=", "<", "=", "not", "+", "-", "*", "/"};
  std::set<std::string> declared;
  int depth = 0, checks = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t == "(") {
      ++depth;
      if (i + 1 >= toks.size() || (toks[i + 1] != ")" && !heads.count(toks[i + 1]))) {
        *why = "unknown head after '(' at token " + std::to_string(i);
        return false;
      }
      if (toks[i + 1] == "declare-fun") declared.insert(toks[i + 2]);
      if (toks[i + 1] == "check-sat") ++checks;
    } else if (t == ")") {
      if (--depth < 0) {
        *why = "unbalanced ')'";
        return false;
      }
    } else if (!heads.count(t) && !std::isdigit(static_cast<unsigned char>(t[0])) && t != "QF_NRA" && t != "Real" &&
               !declared.count(t) && !(i > 0 && toks[i - 1] == "declare-fun")) {
      *why = "undeclared symbol " + t;
      return false;
    }
  }
  if (depth != 0) *why = "unbalanced '('";
  if (checks != 1) *why = "expected one check-sat";
  return depth == 0 && checks == 1 && declared.count("x") && declared.count("y1");
}

}  // namespace oracle
