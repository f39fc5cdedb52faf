#include "ucfg/derivations.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "ucfg/error.hpp"

namespace ucfg {

namespace {

// Counting semirings over N ∪ {inf} with 0 * inf = 0.
struct ExactCount {
  BigInt v;
  bool inf = false;

  static ExactCount zero() { return {}; }
  static ExactCount one() { return {BigInt(1), false}; }
  static ExactCount infinity() { return {BigInt(0), true}; }
  bool is_zero() const { return !inf && v == 0; }
  friend ExactCount operator+(const ExactCount& a, const ExactCount& b) {
    if (a.inf || b.inf) return infinity();
    return {a.v + b.v, false};
  }
  friend ExactCount operator*(const ExactCount& a, const ExactCount& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    if (a.inf || b.inf) return infinity();
    return {a.v * b.v, false};
  }
};

struct SatCount {
  static constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t v = 0;

  static SatCount zero() { return {0}; }
  static SatCount one() { return {1}; }
  static SatCount infinity() { return {top}; }
  bool is_zero() const { return v == 0; }
  friend SatCount operator+(SatCount a, SatCount b) {
    std::uint64_t s = a.v + b.v;
    return {s < a.v ? top : s};
  }
  friend SatCount operator*(SatCount a, SatCount b) {
    if (a.v == 0 || b.v == 0) return zero();
    unsigned __int128 p = static_cast<unsigned __int128>(a.v) * b.v;
    return {p > top ? top : static_cast<std::uint64_t>(p)};
  }
};

// Grammar with bodies of length <= 2; fresh chain nonterminals follow the originals.
struct BinaryGrammar {
  int nonterminals = 0;
  int start = 0;
  int alphabet_size = 0;
  std::vector<int> eps_rules;                       // heads of X <- eps
  std::vector<std::pair<int, Symbol>> unary_rules;  // X <- s
  struct Pair {
    int head;
    Symbol left, right;
  };
  std::vector<Pair> pair_rules;
};

BinaryGrammar binarise(const Grammar& g) {
  BinaryGrammar b;
  b.nonterminals = g.nonterminal_count();
  b.start = g.start();
  b.alphabet_size = g.alphabet().size();
  for (const auto& p : g.productions()) {
    const auto& body = p.body;
    if (body.empty()) {
      b.eps_rules.push_back(p.head);
    } else if (body.size() == 1) {
      b.unary_rules.emplace_back(p.head, body[0]);
    } else {
      int head = p.head;
      for (std::size_t i = 0; i + 2 < body.size(); ++i) {
        int fresh = b.nonterminals++;
        b.pair_rules.push_back({head, body[i], Symbol::nt(fresh)});
        head = fresh;
      }
      b.pair_rules.push_back({head, body[body.size() - 2], body.back()});
    }
  }
  return b;
}

// Tarjan SCCs over an adjacency list; components come out successors-first.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  // iterative DFS: (node, next edge position)
  std::vector<std::pair<int, std::size_t>> work;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    work.emplace_back(root, 0);
    while (!work.empty()) {
      auto& [v, pos] = work.back();
      auto vi = static_cast<std::size_t>(v);
      if (pos == 0 && index[vi] < 0) {
        index[vi] = low[vi] = counter++;
        stack.push_back(v);
        on_stack[vi] = true;
      }
      if (pos < adj[vi].size()) {
        int w = adj[vi][pos++];
        auto wi = static_cast<std::size_t>(w);
        if (index[wi] < 0) {
          work.emplace_back(w, 0);
        } else if (on_stack[wi]) {
          low[vi] = std::min(low[vi], index[wi]);
        }
        continue;
      }
      if (low[vi] == index[vi]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp.push_back(w);
        } while (w != v);
        out.push_back(std::move(comp));
      }
      int finished = v;
      work.pop_back();
      if (!work.empty()) {
        auto pi = static_cast<std::size_t>(work.back().first);
        low[pi] = std::min(low[pi], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return out;
}

template <typename C>
std::vector<C> epsilon_counts(const BinaryGrammar& b) {
  const auto n = static_cast<std::size_t>(b.nonterminals);
  std::vector<bool> nullable(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int h : b.eps_rules)
      if (!nullable[static_cast<std::size_t>(h)]) nullable[static_cast<std::size_t>(h)] = changed = true;
    for (const auto& [h, s] : b.unary_rules)
      if (!s.terminal && nullable[static_cast<std::size_t>(s.index)] && !nullable[static_cast<std::size_t>(h)])
        nullable[static_cast<std::size_t>(h)] = changed = true;
    for (const auto& r : b.pair_rules)
      if (!r.left.terminal && !r.right.terminal && nullable[static_cast<std::size_t>(r.left.index)] &&
          nullable[static_cast<std::size_t>(r.right.index)] && !nullable[static_cast<std::size_t>(r.head)])
        nullable[static_cast<std::size_t>(r.head)] = changed = true;
  }
  auto null_nt = [&](const Symbol& s) { return !s.terminal && nullable[static_cast<std::size_t>(s.index)]; };
  std::vector<std::vector<int>> adj(n);
  for (const auto& [h, s] : b.unary_rules)
    if (null_nt(s)) adj[static_cast<std::size_t>(h)].push_back(s.index);
  for (const auto& r : b.pair_rules)
    if (null_nt(r.left) && null_nt(r.right)) {
      adj[static_cast<std::size_t>(r.head)].push_back(r.left.index);
      adj[static_cast<std::size_t>(r.head)].push_back(r.right.index);
    }
  std::vector<std::vector<int>> unary_by_head(n), pair_by_head(n);
  for (std::size_t i = 0; i < b.unary_rules.size(); ++i)
    unary_by_head[static_cast<std::size_t>(b.unary_rules[i].first)].push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < b.pair_rules.size(); ++i)
    pair_by_head[static_cast<std::size_t>(b.pair_rules[i].head)].push_back(static_cast<int>(i));
  std::vector<int> eps_mult(n, 0);
  for (int h : b.eps_rules) ++eps_mult[static_cast<std::size_t>(h)];

  std::vector<C> value(n, C::zero());
  auto val = [&](const Symbol& s) { return s.terminal ? C::zero() : value[static_cast<std::size_t>(s.index)]; };
  for (const auto& comp : strongly_connected(adj)) {
    bool cyclic = comp.size() > 1;
    if (!cyclic) {
      auto x = static_cast<std::size_t>(comp[0]);
      cyclic = std::find(adj[x].begin(), adj[x].end(), comp[0]) != adj[x].end();
    }
    for (int x : comp) {
      auto xi = static_cast<std::size_t>(x);
      if (cyclic) {
        // nodes of a cyclic component are all nullable, hence infinitely ambiguous on eps
        value[xi] = C::infinity();
        continue;
      }
      C total = C::zero();
      for (int k = 0; k < eps_mult[xi]; ++k) total = total + C::one();
      for (int i : unary_by_head[xi]) total = total + val(b.unary_rules[static_cast<std::size_t>(i)].second);
      for (int i : pair_by_head[xi]) {
        const auto& r = b.pair_rules[static_cast<std::size_t>(i)];
        total = total + val(r.left) * val(r.right);
      }
      value[xi] = total;
    }
  }
  return value;
}

// Column-incremental span chart: cells for spans [i, j] are computed when the
// j-th letter is pushed, so a depth-first walk over words shares prefixes.
template <typename C>
class Chart {
 public:
  explicit Chart(const BinaryGrammar& b) : b_(b), eps_(epsilon_counts<C>(b)) {
    const auto n = static_cast<std::size_t>(b.nonterminals);
    by_left_nt_.resize(n);
    by_left_t_.resize(static_cast<std::size_t>(b.alphabet_size));
    edges_.resize(n);
    auto nullable = [&](const Symbol& s) { return !s.terminal && !eps_[static_cast<std::size_t>(s.index)].is_zero(); };
    for (const auto& [h, s] : b.unary_rules) {
      if (s.terminal)
        lexical_.push_back({h, s.index, C::one()});
      else
        edges_[static_cast<std::size_t>(h)].push_back({s.index, C::one()});
    }
    for (const auto& r : b.pair_rules) {
      if (r.left.terminal)
        by_left_t_[static_cast<std::size_t>(r.left.index)].push_back({r.head, r.right});
      else
        by_left_nt_[static_cast<std::size_t>(r.left.index)].push_back({r.head, r.right});
      // one child derives eps, the other takes the whole span
      if (nullable(r.left)) {
        const C& e = eps_[static_cast<std::size_t>(r.left.index)];
        if (r.right.terminal)
          lexical_.push_back({r.head, r.right.index, e});
        else
          edges_[static_cast<std::size_t>(r.head)].push_back({r.right.index, e});
      }
      if (nullable(r.right)) {
        const C& e = eps_[static_cast<std::size_t>(r.right.index)];
        if (r.left.terminal)
          lexical_.push_back({r.head, r.left.index, e});
        else
          edges_[static_cast<std::size_t>(r.head)].push_back({r.left.index, e});
      }
    }
    std::vector<std::vector<int>> adj(n);
    for (std::size_t x = 0; x < n; ++x)
      for (const auto& e : edges_[x]) {
        adj[x].push_back(e.target);
        has_edges_ = true;
      }
    for (auto& comp : strongly_connected(adj)) {
      bool cyclic = comp.size() > 1;
      if (!cyclic) {
        auto x = static_cast<std::size_t>(comp[0]);
        cyclic = std::find(adj[x].begin(), adj[x].end(), comp[0]) != adj[x].end();
      }
      components_.push_back({std::move(comp), cyclic});
    }
    member_.assign(n, -1);
    for (std::size_t c = 0; c < components_.size(); ++c)
      for (int x : components_[c].nodes) member_[static_cast<std::size_t>(x)] = static_cast<int>(c);
    columns_.push_back({eps_});  // span [0, 0]
  }

  int length() const { return static_cast<int>(word_.size()); }

  void push(Letter a) {
    word_.push_back(a);
    const int j = length();
    std::vector<std::vector<C>> column(static_cast<std::size_t>(j) + 1);
    column[static_cast<std::size_t>(j)] = eps_;
    columns_.push_back(std::move(column));
    for (int i = j - 1; i >= 0; --i) compute(i, j);
  }

  void pop() {
    word_.pop_back();
    columns_.pop_back();
  }

  const C& count(int x, int i, int j) const {
    return columns_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
  }

  C start_count() const { return count(b_.start, 0, length()); }

 private:
  struct Branch {
    int head;
    Symbol right;
  };
  struct Lexical {
    int head;
    Letter letter;
    C weight;
  };
  struct Edge {
    int target;
    C weight;
  };
  struct Component {
    std::vector<int> nodes;
    bool cyclic;
  };

  C value(const Symbol& s, int i, int j) const {
    if (s.terminal)
      return (j == i + 1 && word_[static_cast<std::size_t>(i)] == s.index) ? C::one() : C::zero();
    return count(s.index, i, j);
  }

  void compute(int i, int j) {
    const auto n = static_cast<std::size_t>(b_.nonterminals);
    std::vector<C> base(n, C::zero());
    const Letter first = word_[static_cast<std::size_t>(i)];
    if (j == i + 1)
      for (const auto& l : lexical_)
        if (l.letter == first) base[static_cast<std::size_t>(l.head)] = base[static_cast<std::size_t>(l.head)] + l.weight;
    for (int k = i + 1; k < j; ++k) {
      if (k == i + 1)
        for (const auto& r : by_left_t_[static_cast<std::size_t>(first)]) {
          auto h = static_cast<std::size_t>(r.head);
          base[h] = base[h] + value(r.right, k, j);
        }
      const auto& left = columns_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      for (std::size_t x = 0; x < n; ++x) {
        if (left[x].is_zero()) continue;
        for (const auto& r : by_left_nt_[x]) {
          C rv = value(r.right, k, j);
          if (rv.is_zero()) continue;
          auto h = static_cast<std::size_t>(r.head);
          base[h] = base[h] + left[x] * rv;
        }
      }
    }
    auto& cell = columns_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (!has_edges_) {
      cell = std::move(base);
      return;
    }
    // c = base + M c over same-span edges, least solution in N ∪ {inf};
    // components come successors-first
    cell.assign(n, C::zero());
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const auto& comp = components_[c];
      if (comp.cyclic) {
        bool positive = false;
        for (int x : comp.nodes) {
          auto xi = static_cast<std::size_t>(x);
          if (!base[xi].is_zero()) positive = true;
          for (const auto& e : edges_[xi])
            if (member_[static_cast<std::size_t>(e.target)] != static_cast<int>(c) &&
                !cell[static_cast<std::size_t>(e.target)].is_zero())
              positive = true;
        }
        for (int x : comp.nodes) cell[static_cast<std::size_t>(x)] = positive ? C::infinity() : C::zero();
      } else {
        auto xi = static_cast<std::size_t>(comp.nodes[0]);
        C total = base[xi];
        for (const auto& e : edges_[xi]) total = total + e.weight * cell[static_cast<std::size_t>(e.target)];
        cell[xi] = total;
      }
    }
  }

  const BinaryGrammar& b_;
  std::vector<C> eps_;
  std::vector<Lexical> lexical_;
  std::vector<std::vector<Branch>> by_left_nt_, by_left_t_;
  std::vector<std::vector<Edge>> edges_;
  bool has_edges_ = false;
  std::vector<Component> components_;
  std::vector<int> member_;
  Word word_;
  // columns_[j][i][x]: derivations of word[i..j) from x
  std::vector<std::vector<std::vector<C>>> columns_;
};

}  // namespace

std::vector<std::optional<BigInt>> epsilon_tree_counts(const Grammar& g) {
  auto b = binarise(g);
  auto counts = epsilon_counts<ExactCount>(b);
  std::vector<std::optional<BigInt>> out;
  for (int x = 0; x < g.nonterminal_count(); ++x) {
    const auto& c = counts[static_cast<std::size_t>(x)];
    out.push_back(c.inf ? std::nullopt : std::optional<BigInt>(c.v));
  }
  return out;
}

DerivationCount count_derivations(const Grammar& g, const Word& w) {
  validate_word(g.alphabet(), w);
  auto b = binarise(g);
  Chart<ExactCount> chart(b);
  for (Letter a : w) chart.push(a);
  auto c = chart.start_count();
  return {w, c.inf ? BigInt(0) : c.v, c.inf};
}

bool accepts(const Grammar& g, const Word& w) {
  validate_word(g.alphabet(), w);
  auto b = binarise(g);
  Chart<SatCount> chart(b);
  for (Letter a : w) chart.push(a);
  return !chart.start_count().is_zero();
}

void for_each_word_with_count(const Grammar& g, int bound,
                              const std::function<bool(const Word&, std::uint64_t)>& visit) {
  auto b = binarise(g);
  Chart<SatCount> chart(b);
  Word w;
  const int sigma = g.alphabet().size();
  // explicit stack of next letters to try at each depth
  std::function<void()> dfs = [&]() {
    if (!visit(w, chart.start_count().v)) return;
    if (static_cast<int>(w.size()) >= bound) return;
    for (Letter a = 0; a < sigma; ++a) {
      w.push_back(a);
      chart.push(a);
      dfs();
      chart.pop();
      w.pop_back();
    }
  };
  dfs();
}

namespace {

// Leftmost derivations of a short-GNF grammar as pending nonterminal stacks
// (top at the back) with saturating multiplicities. Stacks that cannot be
// completed within the remaining length are dropped, so dead prefixes prune.
class GnfSearch {
 public:
  using Stacks = std::map<std::vector<int>, std::uint64_t>;

  explicit GnfSearch(const Grammar& g) : start_(g.start()), by_letter_(static_cast<std::size_t>(g.nonterminal_count())) {
    const auto k = static_cast<std::size_t>(g.nonterminal_count());
    nullable_.assign(k, false);
    for (const auto& p : g.productions()) {
      if (p.is_epsilon()) {
        nullable_[static_cast<std::size_t>(p.head)] = true;
      } else {
        auto& row = by_letter_[static_cast<std::size_t>(p.head)];
        row.push_back({p.body[0].index, p.body[1].index, p.body[2].index});
      }
    }
    constexpr int unreachable = std::numeric_limits<int>::max() / 4;
    min_len_.assign(k, unreachable);
    for (std::size_t x = 0; x < k; ++x)
      if (nullable_[x]) min_len_[x] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t x = 0; x < k; ++x)
        for (const auto& r : by_letter_[x]) {
          int v = 1 + min_len_[static_cast<std::size_t>(r.y)] + min_len_[static_cast<std::size_t>(r.z)];
          if (v < min_len_[x]) {
            min_len_[x] = v;
            changed = true;
          }
        }
    }
  }

  Stacks initial() const { return {{{start_}, 1}}; }

  static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
  }

  int min_completion(const std::vector<int>& s) const {
    int total = 0;
    for (int x : s) total += min_len_[static_cast<std::size_t>(x)];
    return total;
  }

  std::uint64_t completions(const Stacks& st) const {
    std::uint64_t total = 0;
    for (const auto& [s, m] : st)
      if (std::all_of(s.begin(), s.end(), [&](int x) { return nullable_[static_cast<std::size_t>(x)]; }))
        total = add(total, m);
    return total;
  }

  Stacks step(const Stacks& st, Letter a, int remaining) const {
    Stacks next;
    for (const auto& [s, m] : st) {
      auto rest = s;
      while (!rest.empty()) {
        int top = rest.back();
        rest.pop_back();
        for (const auto& r : by_letter_[static_cast<std::size_t>(top)]) {
          if (r.a != a) continue;
          auto t = rest;
          t.push_back(r.z);
          t.push_back(r.y);
          if (min_completion(t) > remaining) continue;
          auto& slot = next[std::move(t)];
          slot = add(slot, m);
        }
        if (!nullable_[static_cast<std::size_t>(top)]) break;
      }
    }
    return next;
  }

 private:
  struct Rule {
    Letter a;
    int y, z;
  };
  int start_;
  std::vector<std::vector<Rule>> by_letter_;
  std::vector<bool> nullable_;
  std::vector<int> min_len_;
};

}  // namespace

struct Recognizer::Impl {
  explicit Impl(const Grammar& g) : alphabet(g.alphabet()), b(binarise(g)), chart(b) {
    if (g.is_short_gnf()) gnf.emplace(g);
  }
  Alphabet alphabet;
  BinaryGrammar b;
  Chart<SatCount> chart;
  std::optional<GnfSearch> gnf;
};

Recognizer::Recognizer(const Grammar& g) : impl_(std::make_unique<Impl>(g)) {}
Recognizer::~Recognizer() = default;

bool Recognizer::operator()(const Word& w) {
  validate_word(impl_->alphabet, w);
  if (impl_->gnf) {
    auto st = impl_->gnf->initial();
    for (std::size_t i = 0; i < w.size() && !st.empty(); ++i)
      st = impl_->gnf->step(st, w[i], static_cast<int>(w.size() - i - 1));
    return impl_->gnf->completions(st) > 0;
  }
  for (Letter a : w) impl_->chart.push(a);
  bool ok = !impl_->chart.start_count().is_zero();
  for (std::size_t i = 0; i < w.size(); ++i) impl_->chart.pop();
  return ok;
}

UnambiguityCheck check_unambiguous_bounded(const Grammar& g, int bound) {
  std::optional<Word> best;
  if (g.is_short_gnf()) {
    GnfSearch search(g);
    const int sigma = g.alphabet().size();
    Word w;
    std::function<void(const GnfSearch::Stacks&)> dfs = [&](const GnfSearch::Stacks& st) {
      if (best && w.size() >= best->size()) return;
      if (search.completions(st) >= 2) {
        best = w;
        return;
      }
      int limit = best ? static_cast<int>(best->size()) - 1 : bound;
      int remaining = limit - static_cast<int>(w.size()) - 1;
      if (remaining < 0) return;
      for (Letter a = 0; a < sigma; ++a) {
        auto next = search.step(st, a, remaining);
        if (next.empty()) continue;
        w.push_back(a);
        dfs(next);
        w.pop_back();
      }
    };
    dfs(search.initial());
  } else {
    for_each_word_with_count(g, bound, [&](const Word& w, std::uint64_t count) {
      if (best && w.size() >= best->size()) return false;
      if (count >= 2) {
        best = w;
        return false;
      }
      return true;
    });
  }
  UnambiguityCheck out;
  out.bound = bound;
  if (best) {
    out.ok = false;
    out.counterexample = count_derivations(g, *best);
  }
  return out;
}

std::vector<BigInt> bounded_word_counts(const Grammar& g, int bound) {
  std::vector<BigInt> counts(static_cast<std::size_t>(bound) + 1, BigInt(0));
  for_each_word_with_count(g, bound, [&](const Word& w, std::uint64_t count) {
    if (count > 0) ++counts[w.size()];
    return true;
  });
  return counts;
}

std::vector<BigInt> short_gnf_length_counts(const Grammar& g, int N) {
  if (!g.is_short_gnf()) throw Error(ErrorKind::not_short_gnf, "length counts need a short-GNF grammar");
  const auto k = static_cast<std::size_t>(g.nonterminal_count());
  std::vector<std::vector<BigInt>> t(k, std::vector<BigInt>(static_cast<std::size_t>(N) + 1, 0));
  for (const auto& p : g.productions())
    if (p.body.empty()) t[static_cast<std::size_t>(p.head)][0] += 1;
  for (int n = 0; n < N; ++n)
    for (const auto& p : g.productions()) {
      if (p.body.empty()) continue;
      const auto& y = t[static_cast<std::size_t>(p.body[1].index)];
      const auto& z = t[static_cast<std::size_t>(p.body[2].index)];
      BigInt acc = 0;
      for (int i = 0; i <= n; ++i) acc += y[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(n - i)];
      t[static_cast<std::size_t>(p.head)][static_cast<std::size_t>(n + 1)] += acc;
    }
  return t[static_cast<std::size_t>(g.start())];
}

}  // namespace ucfg
