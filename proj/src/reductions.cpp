#include "ucfg/reductions.hpp"

#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/hash.hpp"

namespace ucfg {

namespace {

void require_same_alphabet(const Alphabet& a, const Alphabet& b, const char* what) {
  if (!(a == b)) throw Error(ErrorKind::alphabet_mismatch, std::string(what) + ": alphabets differ");
}

class Names {
 public:
  explicit Names(const Alphabet& sigma) {
    for (const auto& l : sigma.letters()) used_.insert(l);
    used_.insert("eps");
  }
  std::string take(const std::string& base) {
    std::string n = base;
    for (int i = 1; used_.count(n); ++i) n = base + "_" + std::to_string(i);
    used_.insert(n);
    return n;
  }

 private:
  std::set<std::string> used_;
};

std::vector<std::vector<int>> delta_table(const Automaton& d) {
  std::vector<std::vector<int>> delta(static_cast<std::size_t>(d.state_count()),
                                      std::vector<int>(static_cast<std::size_t>(d.alphabet().size()), -1));
  for (const auto& t : d.transitions()) delta[static_cast<std::size_t>(t.from)][static_cast<std::size_t>(t.letter)] = t.to;
  return delta;
}

Automaton automaton_union(const Automaton& x, const Automaton& y) {
  require_same_alphabet(x.alphabet(), y.alphabet(), "union");
  std::vector<std::string> names = x.states();
  std::set<std::string> used(names.begin(), names.end());
  for (const auto& s : y.states()) {
    std::string n = "~" + s;
    while (used.count(n)) n = "~" + n;
    used.insert(n);
    names.push_back(n);
  }
  const int off = x.state_count();
  std::vector<int> init = x.initial(), acc = x.accepting();
  for (int q : y.initial()) init.push_back(q + off);
  for (int q : y.accepting()) acc.push_back(q + off);
  std::vector<Transition> ts = x.transitions();
  for (const auto& t : y.transitions()) ts.push_back({t.from + off, t.letter, t.to + off, 0});
  return Automaton(x.alphabet(), names, init, acc, ts);
}

}  // namespace

LabeledMachine determinise_lhs(const Automaton& input) {
  Automaton t = totalise(input);
  if (t.initial().size() != 1) {
    auto names = t.states();
    std::string init = "init";
    for (int i = 1; t.find_state(init); ++i) init = "init_" + std::to_string(i);
    names.push_back(init);
    const int i0 = t.state_count();
    auto ts = t.transitions();
    bool accepting = false;
    for (int q : t.initial()) {
      accepting = accepting || t.is_accepting(q);
      for (int id : t.out(q)) {
        const auto& tr = t.transitions()[static_cast<std::size_t>(id)];
        ts.push_back({i0, tr.letter, tr.to, 0});
      }
    }
    auto acc = t.accepting();
    if (accepting) acc.push_back(i0);
    t = Automaton(t.alphabet(), names, {i0}, acc, ts);
  }
  std::vector<std::string> letters;
  std::set<std::string> used;
  std::map<std::tuple<int, int, int>, int> parallel;
  LabeledMachine m;
  m.original = input.alphabet();
  std::vector<Transition> ts;
  for (const auto& tr : t.transitions()) {
    int k = parallel[{tr.from, tr.letter, tr.to}]++;
    std::string name = t.state_name(tr.from) + ":" + t.alphabet().name(tr.letter) + ":" + t.state_name(tr.to) + "#" +
                       std::to_string(k);
    while (used.count(name)) name += "'";
    used.insert(name);
    letters.push_back(name);
    m.h.push_back(tr.letter);
    ts.push_back({tr.from, tr.id, tr.to, 0});
  }
  m.machine = Automaton(Alphabet(letters), t.states(), t.initial(), t.accepting(), ts);
  return m;
}

Word project(const LabeledMachine& m, const Word& lifted_word) {
  Word w;
  for (Letter l : lifted_word) w.push_back(m.h.at(static_cast<std::size_t>(l)));
  return w;
}

Automaton lift_rhs(const Automaton& b, const LabeledMachine& m) {
  require_same_alphabet(b.alphabet(), m.original, "lift_rhs");
  std::vector<std::vector<Letter>> preimage(static_cast<std::size_t>(b.alphabet().size()));
  for (std::size_t l = 0; l < m.h.size(); ++l) preimage[static_cast<std::size_t>(m.h[l])].push_back(static_cast<Letter>(l));
  std::vector<Transition> ts;
  for (const auto& t : b.transitions())
    for (Letter l : preimage[static_cast<std::size_t>(t.letter)]) ts.push_back({t.from, l, t.to, 0});
  Automaton out(m.lifted(), b.states(), b.initial(), b.accepting(), ts);
  return b.automaton_class() == AutomatonClass::UFA ? out.mark_unambiguous() : out;
}

Grammar lift_rhs(const Grammar& g, const LabeledMachine& m) {
  require_same_alphabet(g.alphabet(), m.original, "lift_rhs");
  std::vector<std::vector<Letter>> preimage(static_cast<std::size_t>(g.alphabet().size()));
  for (std::size_t l = 0; l < m.h.size(); ++l) preimage[static_cast<std::size_t>(m.h[l])].push_back(static_cast<Letter>(l));
  std::vector<Production> prods;
  auto names = g.nonterminals();
  if (g.is_short_gnf()) {
    for (const auto& p : g.productions()) {
      if (p.body.empty()) {
        prods.push_back(p);
        continue;
      }
      for (Letter l : preimage[static_cast<std::size_t>(p.body[0].index)])
        prods.push_back({p.head, {Symbol::t(l), p.body[1], p.body[2]}});
    }
    return Grammar(m.lifted(), names, g.start(), prods, g.unambiguity());
  }
  Names pool(m.lifted());
  for (const auto& n : names) pool.take(n);
  std::map<Letter, int> h_nt;
  for (const auto& p : g.productions()) {
    Production q{p.head, {}};
    for (const auto& s : p.body) {
      if (!s.terminal) {
        q.body.push_back(s);
        continue;
      }
      auto it = h_nt.find(s.index);
      if (it == h_nt.end()) {
        names.push_back(pool.take("H_" + g.alphabet().name(s.index)));
        it = h_nt.emplace(s.index, static_cast<int>(names.size()) - 1).first;
      }
      q.body.push_back(Symbol::nt(it->second));
    }
    prods.push_back(std::move(q));
  }
  for (auto [a, x] : h_nt)
    for (Letter l : preimage[static_cast<std::size_t>(a)]) prods.push_back({x, {Symbol::t(l)}});
  return Grammar(m.lifted(), names, g.start(), prods, g.unambiguity());
}

std::string provenance_json(const Provenance& p) {
  nlohmann::ordered_json j;
  j["query"] = p.query;
  j["lhs_hash"] = p.lhs_hash;
  j["rhs_hash"] = p.rhs_hash;
  j["lifted_alphabet_size"] = p.lifted_alphabet;
  j["steps"] = p.steps;
  return j.dump(2) + "\n";
}

Grammar product_ucfg_dfa(const Grammar& g, const Automaton& dfa) {
  if (!g.is_short_gnf()) throw Error(ErrorKind::not_short_gnf, "product needs a short-GNF grammar");
  if (!dfa.is_deterministic()) throw Error(ErrorKind::not_deterministic, "product needs a DFA");
  require_same_alphabet(g.alphabet(), dfa.alphabet(), "product");
  Automaton d = totalise(dfa);
  auto delta = delta_table(d);
  const int s = d.state_count();
  const int q0 = d.initial().front();

  Names pool(g.alphabet());
  std::vector<std::string> names{pool.take(g.nonterminal_name(g.start()))};
  std::map<std::tuple<int, int, int>, int> ids;
  std::deque<std::tuple<int, int, int>> queue;
  auto id_of = [&](int p, int x, int q) {
    auto [it, fresh] = ids.emplace(std::make_tuple(p, x, q), 0);
    if (fresh) {
      it->second = static_cast<int>(names.size());
      names.push_back(pool.take("[" + d.state_name(p) + "," + g.nonterminal_name(x) + "," + d.state_name(q) + "]"));
      queue.emplace_back(p, x, q);
    }
    return it->second;
  };
  std::vector<std::vector<int>> by_head(static_cast<std::size_t>(g.nonterminal_count()));
  for (std::size_t i = 0; i < g.productions().size(); ++i)
    by_head[static_cast<std::size_t>(g.productions()[i].head)].push_back(static_cast<int>(i));

  std::vector<Production> prods;
  auto expand = [&](int head, int p, int x, int q) {
    for (int i : by_head[static_cast<std::size_t>(x)]) {
      const auto& pr = g.productions()[static_cast<std::size_t>(i)];
      if (pr.body.empty()) {
        if (p == q) prods.push_back({head, {}});
        continue;
      }
      const Letter a = pr.body[0].index;
      const int p1 = delta[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
      for (int r = 0; r < s; ++r) {
        int left = id_of(p1, pr.body[1].index, r);
        int right = id_of(r, pr.body[2].index, q);
        prods.push_back({head, {Symbol::t(a), Symbol::nt(left), Symbol::nt(right)}});
      }
    }
  };
  for (int f : d.accepting()) expand(0, q0, g.start(), f);
  while (!queue.empty()) {
    auto [p, x, q] = queue.front();
    queue.pop_front();
    expand(ids.at({p, x, q}), p, x, q);
  }
  return trim(Grammar(g.alphabet(), names, 0, prods, g.unambiguity())).grammar;
}

Grammar disjoint_union(const Grammar& input, const Automaton& dfa, int check_length) {
  if (!dfa.is_deterministic()) throw Error(ErrorKind::not_deterministic, "disjoint union needs a DFA");
  require_same_alphabet(input.alphabet(), dfa.alphabet(), "disjoint union");
  Grammar g = input.is_short_gnf() ? input : to_short_gnf(input).grammar;
  if (check_length >= 0) {
    auto overlap = short_gnf_length_counts(product_ucfg_dfa(g, dfa), check_length);
    for (std::size_t n = 0; n < overlap.size(); ++n)
      if (overlap[n] != 0)
        throw Error(ErrorKind::precondition, "languages overlap: " + to_string(overlap[n]) + " shared word(s) of length " +
                                                 std::to_string(n));
  }
  Names pool(g.alphabet());
  std::vector<std::string> names{pool.take(g.nonterminal_name(g.start()) + "_u")};
  for (const auto& n : g.nonterminals()) names.push_back(pool.take(n));
  const int off_g = 1;
  const int off_d = static_cast<int>(names.size());
  for (const auto& q : dfa.states()) names.push_back(pool.take("<" + q + ">"));
  const int e = static_cast<int>(names.size());
  names.push_back(pool.take("E"));

  std::vector<Production> prods;
  auto shift = [&](const Production& p, int head) {
    Production q{head, p.body};
    for (auto& sym : q.body)
      if (!sym.terminal) sym.index += off_g;
    return q;
  };
  for (const auto& p : g.productions()) {
    prods.push_back(shift(p, p.head + off_g));
    if (p.head == g.start()) prods.push_back(shift(p, 0));
  }
  auto dfa_rules = [&](int q, int head) {
    if (dfa.is_accepting(q)) prods.push_back({head, {}});
    for (int id : dfa.out(q)) {
      const auto& t = dfa.transitions()[static_cast<std::size_t>(id)];
      prods.push_back({head, {Symbol::t(t.letter), Symbol::nt(off_d + t.to), Symbol::nt(e)}});
    }
  };
  for (int q = 0; q < dfa.state_count(); ++q) dfa_rules(q, off_d + q);
  for (int q : dfa.initial()) dfa_rules(q, 0);
  prods.push_back({e, {}});
  return trim(Grammar(g.alphabet(), names, 0, prods, g.unambiguity())).grammar;
}

UniversalityInstance inclusion_to_universality(const Automaton& lhs, const Automaton& rhs) {
  if (!lhs.is_deterministic()) throw Error(ErrorKind::not_deterministic, "inclusion_to_universality: lhs must be a DFA");
  require_same_alphabet(lhs.alphabet(), rhs.alphabet(), "inclusion_to_universality");
  Automaton r = classify(rhs);
  if (r.automaton_class() == AutomatonClass::NFA)
    throw Error(ErrorKind::not_unambiguous, "inclusion_to_universality: rhs automaton is ambiguous");
  Automaton l = totalise(lhs);
  Automaton target = automaton_union(intersect(r, l), dfa_complement(l));
  UniversalityInstance inst{target.mark_unambiguous(), {}};
  inst.provenance.query = "inclusion";
  inst.provenance.lhs_hash = content_hash(print_automaton(lhs));
  inst.provenance.rhs_hash = content_hash(print_automaton(rhs));
  inst.provenance.lifted_alphabet = lhs.alphabet().size();
  inst.provenance.steps = {"totalise lhs", "product rhs x lhs", "complement lhs", "disjoint union"};
  return inst;
}

UniversalityInstance inclusion_to_universality(const Automaton& lhs, const Grammar& rhs) {
  if (!lhs.is_deterministic()) throw Error(ErrorKind::not_deterministic, "inclusion_to_universality: lhs must be a DFA");
  require_same_alphabet(lhs.alphabet(), rhs.alphabet(), "inclusion_to_universality");
  if (!rhs.unambiguity().trusted())
    throw Error(ErrorKind::not_unambiguous, "inclusion_to_universality: rhs grammar unambiguity is unknown");
  Grammar g = rhs.is_short_gnf() ? rhs : to_short_gnf(rhs).grammar;
  Automaton l = totalise(lhs);
  // the two parts are disjoint by construction
  Grammar target = disjoint_union(product_ucfg_dfa(g, l), dfa_complement(l), -1);
  UniversalityInstance inst{target, {}};
  inst.provenance.query = "inclusion";
  inst.provenance.lhs_hash = content_hash(print_automaton(lhs));
  inst.provenance.rhs_hash = content_hash(print_grammar(rhs));
  inst.provenance.lifted_alphabet = lhs.alphabet().size();
  inst.provenance.steps = {"short GNF rhs", "totalise lhs", "product rhs x lhs", "complement lhs", "disjoint union"};
  return inst;
}

UfaUniversality decide_ufa_universal(const Automaton& a) {
  UfaUniversality out;
  auto amb = check_unambiguous_nfa(a);
  if (!amb.unambiguous) {
    out.kind = UfaUniversality::Kind::not_unambiguous;
    out.witness = amb.witness;
    return out;
  }
  const int s = a.state_count();
  const int sigma = a.alphabet().size();
  out.checked_up_to = s;
  auto f = path_counts(a, s);
  for (int n = 0; n <= s; ++n) {
    if (f[static_cast<std::size_t>(n)] != pow(BigInt(sigma), n)) {
      out.first_gap = n;
      break;
    }
  }
  if (!out.first_gap) return out;
  out.kind = UfaUniversality::Kind::not_universal;
  const int n = *out.first_gap;
  // paths[m][q]: accepting paths of length m from q
  const auto ns = static_cast<std::size_t>(s);
  std::vector<std::vector<BigInt>> paths(static_cast<std::size_t>(n) + 1, std::vector<BigInt>(ns, 0));
  for (int q : a.accepting()) paths[0][static_cast<std::size_t>(q)] = 1;
  for (int m = 1; m <= n; ++m)
    for (const auto& t : a.transitions())
      paths[static_cast<std::size_t>(m)][static_cast<std::size_t>(t.from)] +=
          paths[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(t.to)];
  std::vector<BigInt> runs(ns, 0);
  for (int q : a.initial()) runs[static_cast<std::size_t>(q)] = 1;
  Word w;
  for (int pos = 0; pos < n; ++pos) {
    const int rest = n - pos - 1;
    const BigInt full = pow(BigInt(sigma), rest);
    for (Letter c = 0; c < sigma; ++c) {
      std::vector<BigInt> next(ns, 0);
      for (const auto& t : a.transitions())
        if (t.letter == c) next[static_cast<std::size_t>(t.to)] += runs[static_cast<std::size_t>(t.from)];
      BigInt count = 0;
      for (std::size_t q = 0; q < ns; ++q) count += next[q] * paths[static_cast<std::size_t>(rest)][q];
      if (count < full) {
        w.push_back(c);
        runs = std::move(next);
        break;
      }
    }
  }
  out.witness = w;
  return out;
}

InclusionVerdict decide_nfa_in_ufa(const Automaton& a, const Automaton& b) {
  require_same_alphabet(a.alphabet(), b.alphabet(), "nfa-in-ufa");
  InclusionVerdict out;
  auto amb = check_unambiguous_nfa(b);
  if (!amb.unambiguous) {
    out.kind = InclusionVerdict::Kind::not_unambiguous;
    out.witness = amb.witness;
    return out;
  }
  LabeledMachine m = determinise_lhs(a);
  Automaton lifted = lift_rhs(b, m).mark_unambiguous();
  auto inst = inclusion_to_universality(m.machine, lifted);
  auto r = decide_ufa_universal(std::get<Automaton>(inst.target));
  out.provenance = inst.provenance;
  out.provenance.query = "nfa-in-ufa";
  out.provenance.lhs_hash = content_hash(print_automaton(a));
  out.provenance.rhs_hash = content_hash(print_automaton(b));
  out.provenance.lifted_alphabet = m.lifted().size();
  out.provenance.steps.insert(out.provenance.steps.begin(), {"determinise lhs", "lift rhs"});
  out.provenance.steps.push_back("ufa universality");
  switch (r.kind) {
    case UfaUniversality::Kind::universal: out.kind = InclusionVerdict::Kind::holds; break;
    case UfaUniversality::Kind::not_universal:
      out.kind = InclusionVerdict::Kind::fails;
      out.witness = project(m, *r.witness);
      break;
    case UfaUniversality::Kind::not_unambiguous:
      throw Error(ErrorKind::not_unambiguous, "internal: reduction produced an ambiguous automaton");
  }
  return out;
}

NfaInUcfgInstance build_nfa_in_ucfg_instance(const Automaton& a, const Grammar& g) {
  require_same_alphabet(a.alphabet(), g.alphabet(), "nfa-in-ucfg");
  if (!g.unambiguity().trusted())
    throw Error(ErrorKind::not_unambiguous, "nfa-in-ucfg: grammar unambiguity must be claimed or verified");
  Grammar gs = g.is_short_gnf() ? g : to_short_gnf(g).grammar;
  LabeledMachine m = determinise_lhs(a);
  auto inst = inclusion_to_universality(m.machine, lift_rhs(gs, m));
  inst.provenance.query = "nfa-in-ucfg";
  inst.provenance.lhs_hash = content_hash(print_automaton(a));
  inst.provenance.rhs_hash = content_hash(print_grammar(g));
  inst.provenance.lifted_alphabet = m.lifted().size();
  inst.provenance.steps.insert(inst.provenance.steps.begin(), {"determinise lhs", "lift rhs"});
  return {inst, m};
}

}  // namespace ucfg
