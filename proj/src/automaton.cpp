#include "ucfg/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "ucfg/error.hpp"

namespace ucfg {

const char* to_string(AutomatonClass c) {
  switch (c) {
    case AutomatonClass::DFA: return "DFA";
    case AutomatonClass::UFA: return "UFA";
    case AutomatonClass::NFA: return "NFA";
  }
  return "?";
}

Automaton::Automaton(Alphabet alphabet, std::vector<std::string> states, std::vector<int> initial,
                     std::vector<int> accepting, std::vector<Transition> transitions)
    : alphabet_(std::move(alphabet)),
      states_(std::move(states)),
      initial_(std::move(initial)),
      accepting_(std::move(accepting)),
      transitions_(std::move(transitions)) {
  const int n = state_count();
  std::set<std::string> names;
  for (const auto& s : states_)
    if (s.empty() || !names.insert(s).second) throw Error(ErrorKind::syntax, "duplicate or empty state name '" + s + "'");
  auto check_state = [&](int q) {
    if (q < 0 || q >= n) throw Error(ErrorKind::undeclared_symbol, "state index " + std::to_string(q) + " out of range");
  };
  initial_mask_.assign(static_cast<std::size_t>(n), false);
  accepting_mask_.assign(static_cast<std::size_t>(n), false);
  for (int q : initial_) {
    check_state(q);
    initial_mask_[static_cast<std::size_t>(q)] = true;
  }
  for (int q : accepting_) {
    check_state(q);
    accepting_mask_[static_cast<std::size_t>(q)] = true;
  }
  // canonical sets: sorted, no repeats
  initial_.clear();
  accepting_.clear();
  for (int q = 0; q < n; ++q) {
    if (initial_mask_[static_cast<std::size_t>(q)]) initial_.push_back(q);
    if (accepting_mask_[static_cast<std::size_t>(q)]) accepting_.push_back(q);
  }
  out_.assign(static_cast<std::size_t>(n), {});
  std::vector<int> per_letter(static_cast<std::size_t>(n) * static_cast<std::size_t>(alphabet_.size()), 0);
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    auto& t = transitions_[i];
    check_state(t.from);
    check_state(t.to);
    if (!alphabet_.contains(t.letter)) throw Error(ErrorKind::undeclared_symbol, "transition letter out of range");
    t.id = static_cast<int>(i);
    out_[static_cast<std::size_t>(t.from)].push_back(t.id);
    ++per_letter[static_cast<std::size_t>(t.from) * static_cast<std::size_t>(alphabet_.size()) + static_cast<std::size_t>(t.letter)];
  }
  bool det = initial_.size() == 1;
  total_ = true;
  for (int c : per_letter) {
    if (c > 1) det = false;
    if (c == 0) total_ = false;
  }
  class_ = det ? AutomatonClass::DFA : AutomatonClass::NFA;
}

std::optional<int> Automaton::find_state(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) return std::nullopt;
  return static_cast<int>(it - states_.begin());
}

Automaton Automaton::mark_unambiguous() const {
  Automaton copy = *this;
  if (copy.class_ == AutomatonClass::NFA) copy.class_ = AutomatonClass::UFA;
  return copy;
}

namespace {

struct Tok {
  std::string text;
  int column;
};

std::vector<Tok> split(const std::string& line) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

}  // namespace

Automaton parse_automaton(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  std::optional<Alphabet> sigma;
  std::optional<std::vector<std::string>> states;
  std::map<std::string, int> index;
  std::vector<int> initial, accepting;
  bool seen_initial = false, seen_accepting = false;
  std::vector<Transition> transitions;
  auto state_of = [&](const Tok& t) {
    if (!states) throw ParseError(ErrorKind::syntax, number, t.column, "'states:' must come first");
    auto it = index.find(t.text);
    if (it == index.end()) throw ParseError(ErrorKind::undeclared_symbol, number, t.column, "undeclared state '" + t.text + "'");
    return it->second;
  };
  while (std::getline(in, line)) {
    ++number;
    auto toks = split(line);
    if (toks.empty() || toks[0].text[0] == '#') continue;
    const std::string& key = toks[0].text;
    if (key == "alphabet:") {
      if (sigma) throw ParseError(ErrorKind::syntax, number, 1, "duplicate alphabet line");
      std::vector<std::string> letters;
      for (std::size_t i = 1; i < toks.size(); ++i) letters.push_back(toks[i].text);
      try {
        sigma = Alphabet(letters);
      } catch (const Error& e) {
        throw ParseError(ErrorKind::syntax, number, 1, e.what());
      }
    } else if (key == "states:") {
      if (states) throw ParseError(ErrorKind::syntax, number, 1, "duplicate states line");
      states.emplace();
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (!index.emplace(toks[i].text, static_cast<int>(states->size())).second)
          throw ParseError(ErrorKind::duplicate_nonterminal, number, toks[i].column, "duplicate state '" + toks[i].text + "'");
        states->push_back(toks[i].text);
      }
    } else if (key == "initial:" || key == "accepting:") {
      auto& target = key == "initial:" ? initial : accepting;
      auto& seen = key == "initial:" ? seen_initial : seen_accepting;
      if (seen) throw ParseError(ErrorKind::syntax, number, 1, "duplicate '" + key + "' line");
      seen = true;
      for (std::size_t i = 1; i < toks.size(); ++i) target.push_back(state_of(toks[i]));
    } else {
      if (toks.size() != 3) throw ParseError(ErrorKind::syntax, number, 1, "expected transition 'p a q'");
      if (!sigma) throw ParseError(ErrorKind::syntax, number, 1, "'alphabet:' must come first");
      int p = state_of(toks[0]);
      auto a = sigma->find(toks[1].text);
      if (!a) throw ParseError(ErrorKind::undeclared_symbol, number, toks[1].column, "undeclared letter '" + toks[1].text + "'");
      int q = state_of(toks[2]);
      transitions.push_back({p, *a, q, 0});
    }
  }
  if (!sigma) throw ParseError(ErrorKind::syntax, number + 1, 1, "missing 'alphabet:' line");
  if (!states) throw ParseError(ErrorKind::syntax, number + 1, 1, "missing 'states:' line");
  return Automaton(*sigma, *states, initial, accepting, transitions);
}

std::string print_automaton(const Automaton& a) {
  std::string out = "alphabet:";
  for (const auto& l : a.alphabet().letters()) out += " " + l;
  out += "\nstates:";
  for (const auto& s : a.states()) out += " " + s;
  out += "\ninitial:";
  for (int q : a.initial()) out += " " + a.state_name(q);
  out += "\naccepting:";
  for (int q : a.accepting()) out += " " + a.state_name(q);
  out += "\n";
  for (const auto& t : a.transitions())
    out += a.state_name(t.from) + " " + a.alphabet().name(t.letter) + " " + a.state_name(t.to) + "\n";
  return out;
}

BigInt count_runs(const Automaton& a, const Word& w) {
  validate_word(a.alphabet(), w);
  std::vector<BigInt> cur(static_cast<std::size_t>(a.state_count()), 0);
  for (int q : a.initial()) cur[static_cast<std::size_t>(q)] = 1;
  for (Letter c : w) {
    std::vector<BigInt> next(cur.size(), 0);
    for (const auto& t : a.transitions())
      if (t.letter == c && cur[static_cast<std::size_t>(t.from)] != 0)
        next[static_cast<std::size_t>(t.to)] += cur[static_cast<std::size_t>(t.from)];
    cur = std::move(next);
  }
  BigInt total = 0;
  for (int q : a.accepting()) total += cur[static_cast<std::size_t>(q)];
  return total;
}

bool accepts(const Automaton& a, const Word& w) {
  validate_word(a.alphabet(), w);
  std::vector<bool> cur(static_cast<std::size_t>(a.state_count()), false);
  for (int q : a.initial()) cur[static_cast<std::size_t>(q)] = true;
  for (Letter c : w) {
    std::vector<bool> next(cur.size(), false);
    for (const auto& t : a.transitions())
      if (t.letter == c && cur[static_cast<std::size_t>(t.from)]) next[static_cast<std::size_t>(t.to)] = true;
    cur = std::move(next);
  }
  for (int q : a.accepting())
    if (cur[static_cast<std::size_t>(q)]) return true;
  return false;
}

std::vector<BigInt> path_counts(const Automaton& a, int N) {
  std::vector<BigInt> out;
  std::vector<BigInt> cur(static_cast<std::size_t>(a.state_count()), 0);
  for (int q : a.initial()) cur[static_cast<std::size_t>(q)] = 1;
  for (int n = 0; n <= N; ++n) {
    BigInt total = 0;
    for (int q : a.accepting()) total += cur[static_cast<std::size_t>(q)];
    out.push_back(total);
    std::vector<BigInt> next(cur.size(), 0);
    for (const auto& t : a.transitions()) next[static_cast<std::size_t>(t.to)] += cur[static_cast<std::size_t>(t.from)];
    cur = std::move(next);
  }
  return out;
}

Automaton trim(const Automaton& a) {
  const auto n = static_cast<std::size_t>(a.state_count());
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::vector<int> stack(a.initial().begin(), a.initial().end());
  for (int q : stack) fwd[static_cast<std::size_t>(q)] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int id : a.out(q)) {
      int r = a.transitions()[static_cast<std::size_t>(id)].to;
      if (!fwd[static_cast<std::size_t>(r)]) {
        fwd[static_cast<std::size_t>(r)] = true;
        stack.push_back(r);
      }
    }
  }
  std::vector<std::vector<int>> rev(n);
  for (const auto& t : a.transitions()) rev[static_cast<std::size_t>(t.to)].push_back(t.from);
  stack.assign(a.accepting().begin(), a.accepting().end());
  for (int q : stack) bwd[static_cast<std::size_t>(q)] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : rev[static_cast<std::size_t>(q)])
      if (!bwd[static_cast<std::size_t>(p)]) {
        bwd[static_cast<std::size_t>(p)] = true;
        stack.push_back(p);
      }
  }
  std::vector<int> remap(n, -1);
  std::vector<std::string> names;
  for (std::size_t q = 0; q < n; ++q)
    if (fwd[q] && bwd[q]) {
      remap[q] = static_cast<int>(names.size());
      names.push_back(a.states()[q]);
    }
  auto keep = [&](const std::vector<int>& qs) {
    std::vector<int> out;
    for (int q : qs)
      if (remap[static_cast<std::size_t>(q)] >= 0) out.push_back(remap[static_cast<std::size_t>(q)]);
    return out;
  };
  std::vector<Transition> ts;
  for (const auto& t : a.transitions())
    if (remap[static_cast<std::size_t>(t.from)] >= 0 && remap[static_cast<std::size_t>(t.to)] >= 0)
      ts.push_back({remap[static_cast<std::size_t>(t.from)], t.letter, remap[static_cast<std::size_t>(t.to)], 0});
  return Automaton(a.alphabet(), names, keep(a.initial()), keep(a.accepting()), ts);
}

NfaUnambiguity check_unambiguous_nfa(const Automaton& input) {
  Automaton a = trim(input);
  const int n = a.state_count();
  // node (p, q, diverged); runs are distinct once they used different transitions
  auto key = [n](int p, int q, bool d) { return (p * n + q) * 2 + (d ? 1 : 0); };
  std::vector<int> parent(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 2, -2);
  std::vector<Letter> via(parent.size(), -1);
  std::deque<std::tuple<int, int, bool>> queue;
  for (int p : a.initial())
    for (int q : a.initial()) {
      int k = key(p, q, p != q);
      if (parent[static_cast<std::size_t>(k)] != -2) continue;
      parent[static_cast<std::size_t>(k)] = -1;
      queue.emplace_back(p, q, p != q);
    }
  std::optional<int> hit;
  // BFS in letter order gives the shortest witness; queue order keeps it deterministic
  while (!queue.empty() && !hit) {
    auto [p, q, d] = queue.front();
    queue.pop_front();
    int k = key(p, q, d);
    if (d && a.is_accepting(p) && a.is_accepting(q)) {
      hit = k;
      break;
    }
    for (Letter c = 0; c < a.alphabet().size(); ++c)
      for (int i : a.out(p)) {
        const auto& t1 = a.transitions()[static_cast<std::size_t>(i)];
        if (t1.letter != c) continue;
        for (int j : a.out(q)) {
          const auto& t2 = a.transitions()[static_cast<std::size_t>(j)];
          if (t2.letter != c) continue;
          bool nd = d || t1.id != t2.id;
          int nk = key(t1.to, t2.to, nd);
          if (parent[static_cast<std::size_t>(nk)] != -2) continue;
          parent[static_cast<std::size_t>(nk)] = k;
          via[static_cast<std::size_t>(nk)] = c;
          queue.emplace_back(t1.to, t2.to, nd);
        }
      }
  }
  NfaUnambiguity out;
  if (!hit) return out;
  out.unambiguous = false;
  Word w;
  for (int k = *hit; parent[static_cast<std::size_t>(k)] != -1; k = parent[static_cast<std::size_t>(k)])
    w.push_back(via[static_cast<std::size_t>(k)]);
  std::reverse(w.begin(), w.end());
  out.witness = w;
  return out;
}

Automaton classify(const Automaton& a) {
  if (a.is_deterministic()) return a;
  return check_unambiguous_nfa(a).unambiguous ? a.mark_unambiguous() : a;
}

Automaton totalise(const Automaton& a) {
  if (a.total()) return a;
  auto names = a.states();
  std::string sink = "sink";
  for (int i = 1; a.find_state(sink); ++i) sink = "sink_" + std::to_string(i);
  names.push_back(sink);
  const int s = a.state_count();
  auto ts = a.transitions();
  const int sigma = a.alphabet().size();
  for (int q = 0; q <= s; ++q)
    for (Letter c = 0; c < sigma; ++c) {
      bool has = false;
      if (q < s)
        for (int id : a.out(q)) has = has || a.transitions()[static_cast<std::size_t>(id)].letter == c;
      if (!has) ts.push_back({q, c, s, 0});
    }
  std::vector<int> init = a.initial();
  if (init.empty()) init.push_back(s);
  Automaton out(a.alphabet(), names, init, a.accepting(), ts);
  return a.automaton_class() == AutomatonClass::UFA ? out.mark_unambiguous() : out;
}

Automaton dfa_complement(const Automaton& a) {
  if (!a.is_deterministic()) throw Error(ErrorKind::not_deterministic, "complement needs a DFA");
  Automaton t = totalise(a);
  std::vector<int> acc;
  for (int q = 0; q < t.state_count(); ++q)
    if (!t.is_accepting(q)) acc.push_back(q);
  return Automaton(t.alphabet(), t.states(), t.initial(), acc, t.transitions());
}

Automaton determinise(const Automaton& a) {
  const int sigma = a.alphabet().size();
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> subsets;
  std::vector<Transition> ts;
  auto id_of = [&](std::vector<int> s) {
    auto [it, fresh] = ids.emplace(s, static_cast<int>(subsets.size()));
    if (fresh) subsets.push_back(std::move(s));
    return it->second;
  };
  id_of(a.initial());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (Letter c = 0; c < sigma; ++c) {
      std::set<int> next;
      for (int q : subsets[i])
        for (int t : a.out(q)) {
          const auto& tr = a.transitions()[static_cast<std::size_t>(t)];
          if (tr.letter == c) next.insert(tr.to);
        }
      int j = id_of(std::vector<int>(next.begin(), next.end()));
      ts.push_back({static_cast<int>(i), c, j, 0});
    }
  }
  std::vector<std::string> names;
  std::vector<int> acc;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::string name = "{";
    bool accepting = false;
    for (std::size_t k = 0; k < subsets[i].size(); ++k) {
      if (k) name += ",";
      name += a.state_name(subsets[i][k]);
      accepting = accepting || a.is_accepting(subsets[i][k]);
    }
    names.push_back(name + "}");
    if (accepting) acc.push_back(static_cast<int>(i));
  }
  return Automaton(a.alphabet(), names, {0}, acc, ts);
}

Automaton intersect(const Automaton& a, const Automaton& b) {
  if (!(a.alphabet() == b.alphabet())) throw Error(ErrorKind::alphabet_mismatch, "product over different alphabets");
  const int m = b.state_count();
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> pairs;
  std::vector<Transition> ts;
  auto id_of = [&](int p, int q) {
    auto [it, fresh] = ids.emplace(std::make_pair(p, q), static_cast<int>(pairs.size()));
    if (fresh) pairs.emplace_back(p, q);
    return it->second;
  };
  std::vector<int> init;
  for (int p : a.initial())
    for (int q : b.initial()) init.push_back(id_of(p, q));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    for (int t1 : a.out(p))
      for (int t2 : b.out(q)) {
        const auto& x = a.transitions()[static_cast<std::size_t>(t1)];
        const auto& y = b.transitions()[static_cast<std::size_t>(t2)];
        if (x.letter == y.letter) ts.push_back({static_cast<int>(i), x.letter, id_of(x.to, y.to), 0});
      }
  }
  (void)m;
  std::vector<std::string> names;
  std::vector<int> acc;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    names.push_back("(" + a.state_name(pairs[i].first) + "," + b.state_name(pairs[i].second) + ")");
    if (a.is_accepting(pairs[i].first) && b.is_accepting(pairs[i].second)) acc.push_back(static_cast<int>(i));
  }
  return Automaton(a.alphabet(), names, init, acc, ts);
}

std::optional<Word> shortest_accepted(const Automaton& a) {
  const auto n = static_cast<std::size_t>(a.state_count());
  std::vector<int> parent(n, -2);
  std::vector<Letter> via(n, -1);
  std::deque<int> queue;
  for (int q : a.initial()) {
    parent[static_cast<std::size_t>(q)] = -1;
    queue.push_back(q);
  }
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    if (a.is_accepting(q)) {
      Word w;
      for (int k = q; parent[static_cast<std::size_t>(k)] != -1; k = parent[static_cast<std::size_t>(k)])
        w.push_back(via[static_cast<std::size_t>(k)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Letter c = 0; c < a.alphabet().size(); ++c)
      for (int id : a.out(q)) {
        const auto& t = a.transitions()[static_cast<std::size_t>(id)];
        if (t.letter != c || parent[static_cast<std::size_t>(t.to)] != -2) continue;
        parent[static_cast<std::size_t>(t.to)] = q;
        via[static_cast<std::size_t>(t.to)] = c;
        queue.push_back(t.to);
      }
  }
  return std::nullopt;
}

std::optional<Word> inclusion_counterexample(const Automaton& a, const Automaton& b) {
  if (!(a.alphabet() == b.alphabet())) throw Error(ErrorKind::alphabet_mismatch, "inclusion over different alphabets");
  using Node = std::pair<int, std::vector<int>>;
  std::map<Node, int> seen;
  std::vector<Node> nodes;
  std::vector<int> parent;
  std::vector<Letter> via;
  auto visit = [&](Node nd, int from, Letter c) {
    if (seen.count(nd)) return;
    seen.emplace(nd, static_cast<int>(nodes.size()));
    nodes.push_back(std::move(nd));
    parent.push_back(from);
    via.push_back(c);
  };
  for (int p : a.initial()) visit({p, b.initial()}, -1, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto node = nodes[i];
    const auto& [p, subset] = node;
    bool b_accepts = false;
    for (int q : subset) b_accepts = b_accepts || b.is_accepting(q);
    if (a.is_accepting(p) && !b_accepts) {
      Word w;
      for (int k = static_cast<int>(i); parent[static_cast<std::size_t>(k)] != -1; k = parent[static_cast<std::size_t>(k)])
        w.push_back(via[static_cast<std::size_t>(k)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Letter c = 0; c < a.alphabet().size(); ++c) {
      std::set<int> next_b;
      for (int q : subset)
        for (int id : b.out(q)) {
          const auto& t = b.transitions()[static_cast<std::size_t>(id)];
          if (t.letter == c) next_b.insert(t.to);
        }
      std::vector<int> nb(next_b.begin(), next_b.end());
      for (int id : a.out(p)) {
        const auto& t = a.transitions()[static_cast<std::size_t>(id)];
        if (t.letter == c) visit({t.to, nb}, static_cast<int>(i), c);
      }
    }
  }
  return std::nullopt;
}

bool subset_oracle_inclusion(const Automaton& a, const Automaton& b) { return !inclusion_counterexample(a, b); }

Automaton universal_automaton(const Alphabet& sigma) {
  std::vector<Transition> ts;
  for (Letter c = 0; c < sigma.size(); ++c) ts.push_back({0, c, 0, 0});
  return Automaton(sigma, {"u"}, {0}, {0}, ts);
}

Automaton empty_automaton(const Alphabet& sigma) { return Automaton(sigma, {"z"}, {0}, {}, {}); }

}  // namespace ucfg
