#include <deque>
#include <functional>
#include <map>
#include <set>

#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/grammar.hpp"

namespace ucfg {

namespace {

// Working grammar with multiplicities instead of duplicate productions.
struct WRule {
  int head;
  std::vector<Symbol> body;
  BigInt weight;
};

struct WGrammar {
  std::vector<std::string> names;
  int start = 0;
  std::vector<WRule> rules;
};

constexpr long kMaxMultiplicity = 100000;

class NamePool {
 public:
  explicit NamePool(const Alphabet& sigma) {
    for (const auto& l : sigma.letters()) used_.insert(l);
    used_.insert("eps");
  }
  std::string take(const std::string& base) {
    std::string name = base;
    for (int i = 1; used_.count(name); ++i) name = base + "_" + std::to_string(i);
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

WGrammar binarise(const Grammar& g) {
  WGrammar w;
  w.names = g.nonterminals();
  w.start = g.start();
  std::set<std::string> used(w.names.begin(), w.names.end());
  for (const auto& l : g.alphabet().letters()) used.insert(l);
  auto fresh = [&](const std::string& base) {
    std::string n = base;
    for (int i = 1; used.count(n); ++i) n = base + "_" + std::to_string(i);
    used.insert(n);
    w.names.push_back(n);
    return static_cast<int>(w.names.size()) - 1;
  };
  for (const auto& p : g.productions()) {
    if (p.body.size() <= 2) {
      w.rules.push_back({p.head, p.body, BigInt(1)});
      continue;
    }
    int head = p.head;
    for (std::size_t i = 0; i + 2 < p.body.size(); ++i) {
      int next = fresh(w.names[static_cast<std::size_t>(p.head)] + "_c");
      w.rules.push_back({head, {p.body[i], Symbol::nt(next)}, BigInt(1)});
      head = next;
    }
    w.rules.push_back({head, {p.body[p.body.size() - 2], p.body.back()}, BigInt(1)});
  }
  return w;
}

Grammar materialise(const Alphabet& sigma, const WGrammar& w, UnambiguityStatus status) {
  std::vector<Production> prods;
  for (const auto& r : w.rules) {
    if (r.weight > kMaxMultiplicity)
      throw Error(ErrorKind::precondition, "normal form needs more than " + std::to_string(kMaxMultiplicity) +
                                               " copies of one production");
    for (long k = 0; k < r.weight.get_si(); ++k) prods.push_back({r.head, r.body});
  }
  return Grammar(sigma, w.names, w.start, std::move(prods), status);
}

// Drops eps-rules, adding the erased variants with weights given by eps-tree counts.
// Returns the eps-tree count of the start symbol.
BigInt remove_epsilon(const Alphabet& sigma, WGrammar& w) {
  Grammar as_grammar = materialise(sigma, w, {});
  auto eps = epsilon_tree_counts(as_grammar);
  for (std::size_t x = 0; x < eps.size(); ++x)
    if (!eps[x])
      throw Error(ErrorKind::cyclic_unit_chain,
                  "nonterminal '" + w.names[x] + "' has infinitely many eps-derivations");
  auto e = [&](const Symbol& s) { return s.terminal ? BigInt(0) : *eps[static_cast<std::size_t>(s.index)]; };
  std::vector<WRule> out;
  for (const auto& r : w.rules) {
    if (r.body.empty()) continue;
    out.push_back(r);
    if (r.body.size() == 2) {
      BigInt el = e(r.body[0]), er = e(r.body[1]);
      if (el != 0) out.push_back({r.head, {r.body[1]}, r.weight * el});
      if (er != 0) out.push_back({r.head, {r.body[0]}, r.weight * er});
    }
  }
  w.rules = std::move(out);
  return *eps[static_cast<std::size_t>(w.start)];
}

// Keeps only nonterminals that are productive and reachable from the start.
void trim_weighted(WGrammar& w) {
  const auto n = w.names.size();
  std::vector<bool> prod(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : w.rules) {
      if (prod[static_cast<std::size_t>(r.head)]) continue;
      bool ok = true;
      for (const auto& s : r.body)
        if (!s.terminal && !prod[static_cast<std::size_t>(s.index)]) ok = false;
      if (ok) prod[static_cast<std::size_t>(r.head)] = changed = true;
    }
  }
  std::vector<bool> reach(n, false);
  std::vector<int> stack{w.start};
  reach[static_cast<std::size_t>(w.start)] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const auto& r : w.rules) {
      if (r.head != x) continue;
      bool ok = true;
      for (const auto& s : r.body)
        if (!s.terminal && !prod[static_cast<std::size_t>(s.index)]) ok = false;
      if (!ok) continue;
      for (const auto& s : r.body)
        if (!s.terminal && !reach[static_cast<std::size_t>(s.index)]) {
          reach[static_cast<std::size_t>(s.index)] = true;
          stack.push_back(s.index);
        }
    }
  }
  std::vector<int> remap(n, -1);
  WGrammar out;
  for (std::size_t x = 0; x < n; ++x)
    if (reach[x] && (prod[x] || static_cast<int>(x) == w.start)) {
      remap[x] = static_cast<int>(out.names.size());
      out.names.push_back(w.names[x]);
    }
  out.start = remap[static_cast<std::size_t>(w.start)];
  for (const auto& r : w.rules) {
    if (remap[static_cast<std::size_t>(r.head)] < 0) continue;
    WRule nr{remap[static_cast<std::size_t>(r.head)], {}, r.weight};
    bool ok = true;
    for (const auto& s : r.body) {
      if (s.terminal) {
        nr.body.push_back(s);
      } else if (remap[static_cast<std::size_t>(s.index)] < 0) {
        ok = false;
      } else {
        nr.body.push_back(Symbol::nt(remap[static_cast<std::size_t>(s.index)]));
      }
    }
    if (ok) out.rules.push_back(std::move(nr));
  }
  w = std::move(out);
}

// Replaces unit rules X <- Y by the non-unit rules of everything unit-reachable from X,
// weighted by the number of unit paths.
void remove_units(WGrammar& w) {
  const int n = static_cast<int>(w.names.size());
  std::vector<std::vector<std::pair<int, BigInt>>> unit(static_cast<std::size_t>(n));
  std::vector<WRule> proper;
  for (const auto& r : w.rules) {
    if (r.body.size() == 1 && !r.body[0].terminal)
      unit[static_cast<std::size_t>(r.head)].emplace_back(r.body[0].index, r.weight);
    else
      proper.push_back(r);
  }
  // topological order on the unit graph; a cycle means infinite ambiguity
  std::vector<int> state(static_cast<std::size_t>(n), 0), order;
  std::function<void(int)> visit = [&](int x) {
    state[static_cast<std::size_t>(x)] = 1;
    for (const auto& [y, wt] : unit[static_cast<std::size_t>(x)]) {
      if (state[static_cast<std::size_t>(y)] == 1)
        throw Error(ErrorKind::cyclic_unit_chain, "unit cycle through '" + w.names[static_cast<std::size_t>(y)] + "'");
      if (state[static_cast<std::size_t>(y)] == 0) visit(y);
    }
    state[static_cast<std::size_t>(x)] = 2;
    order.push_back(x);
  };
  for (int x = 0; x < n; ++x)
    if (state[static_cast<std::size_t>(x)] == 0) visit(x);
  // paths[x][y]: unit paths x =>* y, filled in reverse topological order
  std::vector<std::map<int, BigInt>> paths(static_cast<std::size_t>(n));
  for (int x : order) {
    auto& px = paths[static_cast<std::size_t>(x)];
    px[x] += 1;
    for (const auto& [y, wt] : unit[static_cast<std::size_t>(x)])
      for (const auto& [z, c] : paths[static_cast<std::size_t>(y)]) px[z] += wt * c;
  }
  std::vector<std::vector<const WRule*>> by_head(static_cast<std::size_t>(n));
  for (const auto& r : proper) by_head[static_cast<std::size_t>(r.head)].push_back(&r);
  std::vector<WRule> out;
  for (int x = 0; x < n; ++x)
    for (const auto& [y, c] : paths[static_cast<std::size_t>(x)])
      for (const WRule* r : by_head[static_cast<std::size_t>(y)]) out.push_back({x, r->body, c * r->weight});
  w.rules = std::move(out);
}

// Turns terminals inside binary bodies into T_a nonterminals.
void isolate_terminals(const Alphabet& sigma, WGrammar& w) {
  std::set<std::string> used(w.names.begin(), w.names.end());
  std::map<int, int> term_nt;
  std::vector<WRule> extra;
  for (auto& r : w.rules) {
    if (r.body.size() != 2) continue;
    for (auto& s : r.body) {
      if (!s.terminal) continue;
      auto it = term_nt.find(s.index);
      if (it == term_nt.end()) {
        std::string base = "T_" + sigma.name(s.index), name = base;
        for (int i = 1; used.count(name); ++i) name = base + "_" + std::to_string(i);
        used.insert(name);
        w.names.push_back(name);
        int id = static_cast<int>(w.names.size()) - 1;
        extra.push_back({id, {s}, BigInt(1)});
        it = term_nt.emplace(s.index, id).first;
      }
      s = Symbol::nt(it->second);
    }
  }
  for (auto& r : extra) w.rules.push_back(std::move(r));
}

// Left-corner transform of a CNF grammar (rules X <- a, X <- Y Z).
WGrammar left_corner(const Alphabet& sigma, const WGrammar& cnf, const BigInt& start_eps) {
  const auto m = cnf.names.size();
  // lc[a][x]: x is a reflexive-transitive left corner of a
  std::vector<std::vector<bool>> lc(m, std::vector<bool>(m, false));
  for (std::size_t a = 0; a < m; ++a) lc[a][a] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : cnf.rules) {
      if (r.body.size() != 2) continue;
      auto b = static_cast<std::size_t>(r.head), x = static_cast<std::size_t>(r.body[0].index);
      for (std::size_t a = 0; a < m; ++a)
        if (lc[a][b] && !lc[a][x]) lc[a][x] = changed = true;
    }
  }
  std::vector<const WRule*> lexical;
  std::vector<std::vector<const WRule*>> by_left(m);
  for (const auto& r : cnf.rules) {
    if (r.body.size() == 1)
      lexical.push_back(&r);
    else
      by_left[static_cast<std::size_t>(r.body[0].index)].push_back(&r);
  }

  NamePool pool(sigma);
  WGrammar out;
  out.names.push_back(pool.take(cnf.names[static_cast<std::size_t>(cnf.start)]));
  out.start = 0;
  out.names.push_back(pool.take("E"));
  const int e_nt = 1;
  out.rules.push_back({e_nt, {}, BigInt(1)});
  if (start_eps != 0) out.rules.push_back({0, {}, start_eps});

  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> queue;
  auto pair_id = [&](int a, int x) {
    auto [it, fresh] = ids.emplace(std::make_pair(a, x), 0);
    if (fresh) {
      it->second = static_cast<int>(out.names.size());
      out.names.push_back(pool.take("[" + cnf.names[static_cast<std::size_t>(a)] + "/" +
                                    cnf.names[static_cast<std::size_t>(x)] + "]"));
      queue.emplace_back(a, x);
    }
    return it->second;
  };

  const auto s = static_cast<std::size_t>(cnf.start);
  for (const WRule* r : lexical)
    if (lc[s][static_cast<std::size_t>(r->head)])
      out.rules.push_back({0, {r->body[0], Symbol::nt(pair_id(cnf.start, r->head)), Symbol::nt(e_nt)}, r->weight});

  while (!queue.empty()) {
    auto [a, x] = queue.front();
    queue.pop_front();
    int self = ids.at({a, x});
    if (a == x) out.rules.push_back({self, {}, BigInt(1)});
    for (const WRule* r : by_left[static_cast<std::size_t>(x)]) {
      int b = r->head;
      if (!lc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
      int c = r->body[1].index;
      for (const WRule* t : lexical) {
        if (!lc[static_cast<std::size_t>(c)][static_cast<std::size_t>(t->head)]) continue;
        int left = pair_id(c, t->head);
        int right = pair_id(a, b);
        out.rules.push_back({self, {t->body[0], Symbol::nt(left), Symbol::nt(right)}, r->weight * t->weight});
      }
    }
  }
  return out;
}

}  // namespace

ShortGnfResult to_short_gnf(const Grammar& g) {
  auto trimmed = trim(g);
  if (trimmed.grammar.is_short_gnf()) return {trimmed.grammar, trimmed.removed};
  const Alphabet& sigma = g.alphabet();

  WGrammar w = binarise(trimmed.grammar);
  BigInt start_eps = remove_epsilon(sigma, w);
  trim_weighted(w);
  remove_units(w);
  trim_weighted(w);
  isolate_terminals(sigma, w);
  WGrammar gnf = left_corner(sigma, w, start_eps);
  trim_weighted(gnf);
  Grammar out = trim(materialise(sigma, gnf, g.unambiguity())).grammar;
  return {out, trimmed.removed};
}

}  // namespace ucfg
