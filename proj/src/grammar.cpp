#include "ucfg/grammar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ucfg/error.hpp"

namespace ucfg {

Grammar::Grammar(Alphabet alphabet, std::vector<std::string> nonterminals, int start,
                 std::vector<Production> productions, UnambiguityStatus status)
    : alphabet_(std::move(alphabet)),
      nonterminals_(std::move(nonterminals)),
      start_(start),
      productions_(std::move(productions)),
      status_(status) {
  const int k = nonterminal_count();
  if (start_ < 0 || start_ >= k)
    throw Error(ErrorKind::undeclared_symbol, "start symbol is not a declared nonterminal");
  std::set<std::string> names(alphabet_.letters().begin(), alphabet_.letters().end());
  for (const auto& x : nonterminals_) {
    if (x.empty()) throw Error(ErrorKind::syntax, "empty nonterminal name");
    if (!names.insert(x).second)
      throw Error(ErrorKind::duplicate_nonterminal, "symbol '" + x + "' declared twice");
  }
  for (const auto& p : productions_) {
    if (p.head < 0 || p.head >= k)
      throw Error(ErrorKind::undeclared_symbol, "production head out of range");
    for (const auto& s : p.body) {
      bool ok = s.terminal ? alphabet_.contains(s.index) : (s.index >= 0 && s.index < k);
      if (!ok) throw Error(ErrorKind::undeclared_symbol, "production body uses an undeclared symbol");
    }
  }
  std::stable_sort(productions_.begin(), productions_.end(),
                   [](const Production& a, const Production& b) { return a.head < b.head; });
}

std::optional<int> Grammar::find_nonterminal(std::string_view name) const {
  auto it = std::find(nonterminals_.begin(), nonterminals_.end(), name);
  if (it == nonterminals_.end()) return std::nullopt;
  return static_cast<int>(it - nonterminals_.begin());
}

bool Grammar::is_short_gnf() const {
  return std::all_of(productions_.begin(), productions_.end(), [](const Production& p) {
    return p.body.empty() || (p.body.size() == 3 && p.body[0].terminal && !p.body[1].terminal &&
                              !p.body[2].terminal);
  });
}

std::vector<int> Grammar::productions_of(int head) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < productions_.size(); ++i)
    if (productions_[i].head == head) out.push_back(static_cast<int>(i));
  return out;
}

Grammar Grammar::with_status(UnambiguityStatus status) const {
  Grammar g = *this;
  g.status_ = status;
  return g;
}

namespace {

struct Token {
  std::string text;
  int column;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

struct RawLine {
  int number;
  std::vector<Token> tokens;
};

}  // namespace

Grammar parse_grammar(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  std::optional<std::vector<std::string>> letters;
  std::optional<Token> start_tok;
  int start_line = 0;
  UnambiguityStatus status;
  std::vector<RawLine> rules;
  while (std::getline(in, line)) {
    ++number;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0].text[0] == '#') continue;
    const std::string& key = toks[0].text;
    if (key == "alphabet:") {
      if (letters) throw ParseError(ErrorKind::syntax, number, 1, "duplicate alphabet line");
      letters.emplace();
      for (std::size_t i = 1; i < toks.size(); ++i) letters->push_back(toks[i].text);
      try {
        Alphabet check(*letters);
      } catch (const Error& e) {
        throw ParseError(ErrorKind::syntax, number, 1, e.what());
      }
    } else if (key == "start:") {
      if (toks.size() != 2) throw ParseError(ErrorKind::syntax, number, 1, "expected 'start: X'");
      start_tok = toks[1];
      start_line = number;
    } else if (key == "unambiguity:") {
      if (toks.size() == 2 && toks[1].text == "claimed") {
        status = UnambiguityStatus::claimed();
      } else if (toks.size() == 2 && toks[1].text == "unknown") {
        status = {};
      } else if (toks.size() == 3 && toks[1].text == "verified") {
        try {
          status = UnambiguityStatus::verified(std::stoi(toks[2].text));
        } catch (const std::exception&) {
          throw ParseError(ErrorKind::syntax, number, toks[2].column, "expected a length bound");
        }
      } else {
        throw ParseError(ErrorKind::syntax, number, 1, "expected 'unambiguity: claimed|unknown|verified N'");
      }
    } else {
      rules.push_back({number, std::move(toks)});
    }
  }
  if (!letters) throw ParseError(ErrorKind::syntax, number + 1, 1, "missing 'alphabet:' line");
  if (!start_tok) throw ParseError(ErrorKind::syntax, number + 1, 1, "missing 'start:' line");
  Alphabet sigma(*letters);

  std::vector<std::string> nts;
  std::map<std::string, int> nt_index;
  for (const auto& r : rules) {
    if (r.tokens.size() < 2 || r.tokens[1].text != "->")
      throw ParseError(ErrorKind::malformed_production, r.number, r.tokens[0].column,
                       "expected 'X -> body | body'");
    const auto& head = r.tokens[0];
    if (head.text == "->" || head.text == "|" || head.text == "eps")
      throw ParseError(ErrorKind::malformed_production, r.number, head.column, "invalid head");
    if (sigma.find(head.text))
      throw ParseError(ErrorKind::malformed_production, r.number, head.column,
                       "terminal '" + head.text + "' used as production head");
    if (nt_index.count(head.text))
      throw ParseError(ErrorKind::duplicate_nonterminal, r.number, head.column,
                       "nonterminal '" + head.text + "' has a second production line");
    nt_index[head.text] = static_cast<int>(nts.size());
    nts.push_back(head.text);
  }
  auto start_it = nt_index.find(start_tok->text);
  if (start_it == nt_index.end())
    throw ParseError(ErrorKind::undeclared_symbol, start_line, start_tok->column,
                     "start symbol '" + start_tok->text + "' has no production line");

  std::vector<Production> prods;
  for (const auto& r : rules) {
    const int head = nt_index[r.tokens[0].text];
    if (r.tokens.size() == 2) continue;  // "X ->" declares X with no productions
    std::vector<Symbol> body;
    bool eps = false;
    auto flush = [&](const Token& at) {
      if (body.empty() && !eps)
        throw ParseError(ErrorKind::malformed_production, r.number, at.column, "empty alternative");
      prods.push_back({head, body});
      body.clear();
      eps = false;
    };
    for (std::size_t i = 2; i < r.tokens.size(); ++i) {
      const Token& t = r.tokens[i];
      if (t.text == "|") {
        flush(t);
      } else if (t.text == "eps") {
        if (!body.empty() || eps)
          throw ParseError(ErrorKind::malformed_production, r.number, t.column,
                           "'eps' must stand alone in an alternative");
        eps = true;
      } else if (t.text == "->") {
        throw ParseError(ErrorKind::malformed_production, r.number, t.column, "unexpected '->'");
      } else {
        if (eps)
          throw ParseError(ErrorKind::malformed_production, r.number, t.column,
                           "'eps' must stand alone in an alternative");
        if (auto a = sigma.find(t.text)) {
          body.push_back(Symbol::t(*a));
        } else if (auto it = nt_index.find(t.text); it != nt_index.end()) {
          body.push_back(Symbol::nt(it->second));
        } else {
          throw ParseError(ErrorKind::undeclared_symbol, r.number, t.column,
                           "undeclared symbol '" + t.text + "'");
        }
      }
    }
    flush(r.tokens.back());
  }
  return Grammar(std::move(sigma), std::move(nts), start_it->second, std::move(prods), status);
}

std::string print_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "alphabet:";
  for (const auto& l : g.alphabet().letters()) out << ' ' << l;
  out << "\nstart: " << g.nonterminal_name(g.start()) << '\n';
  switch (g.unambiguity().kind) {
    case UnambiguityStatus::Kind::claimed: out << "unambiguity: claimed\n"; break;
    case UnambiguityStatus::Kind::bounded_verified:
      out << "unambiguity: verified " << g.unambiguity().bound << '\n';
      break;
    case UnambiguityStatus::Kind::unknown: break;
  }
  for (int x = 0; x < g.nonterminal_count(); ++x) {
    out << g.nonterminal_name(x) << " ->";
    bool first = true;
    for (const auto& p : g.productions()) {
      if (p.head != x) continue;
      if (!first) out << " |";
      first = false;
      if (p.body.empty()) out << " eps";
      for (const auto& s : p.body)
        out << ' ' << (s.terminal ? g.alphabet().name(s.index) : g.nonterminal_name(s.index));
    }
    out << '\n';
  }
  return out.str();
}

std::string fresh_name(const Grammar& g, const std::string& base) {
  auto used = [&](const std::string& n) {
    return g.find_nonterminal(n).has_value() || g.alphabet().find(n).has_value();
  };
  if (!used(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!used(candidate)) return candidate;
  }
}

std::vector<bool> productive_set(const Grammar& g) {
  std::vector<bool> prod(static_cast<std::size_t>(g.nonterminal_count()), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      if (prod[static_cast<std::size_t>(p.head)]) continue;
      bool ok = std::all_of(p.body.begin(), p.body.end(), [&](const Symbol& s) {
        return s.terminal || prod[static_cast<std::size_t>(s.index)];
      });
      if (ok) prod[static_cast<std::size_t>(p.head)] = changed = true;
    }
  }
  return prod;
}

std::vector<bool> nullable_set(const Grammar& g) {
  std::vector<bool> null(static_cast<std::size_t>(g.nonterminal_count()), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      if (null[static_cast<std::size_t>(p.head)]) continue;
      bool ok = std::all_of(p.body.begin(), p.body.end(), [&](const Symbol& s) {
        return !s.terminal && null[static_cast<std::size_t>(s.index)];
      });
      if (ok) null[static_cast<std::size_t>(p.head)] = changed = true;
    }
  }
  return null;
}

namespace {

// Keeps nonterminals with keep[x]; drops productions mentioning removed ones.
Grammar restrict(const Grammar& g, const std::vector<bool>& keep) {
  std::vector<int> remap(static_cast<std::size_t>(g.nonterminal_count()), -1);
  std::vector<std::string> names;
  for (int x = 0; x < g.nonterminal_count(); ++x) {
    if (!keep[static_cast<std::size_t>(x)]) continue;
    remap[static_cast<std::size_t>(x)] = static_cast<int>(names.size());
    names.push_back(g.nonterminal_name(x));
  }
  std::vector<Production> prods;
  for (const auto& p : g.productions()) {
    if (remap[static_cast<std::size_t>(p.head)] < 0) continue;
    Production q{remap[static_cast<std::size_t>(p.head)], {}};
    bool ok = true;
    for (const auto& s : p.body) {
      if (s.terminal) {
        q.body.push_back(s);
      } else if (remap[static_cast<std::size_t>(s.index)] < 0) {
        ok = false;
        break;
      } else {
        q.body.push_back(Symbol::nt(remap[static_cast<std::size_t>(s.index)]));
      }
    }
    if (ok) prods.push_back(std::move(q));
  }
  return Grammar(g.alphabet(), std::move(names), remap[static_cast<std::size_t>(g.start())],
                 std::move(prods), g.unambiguity());
}

}  // namespace

TrimResult trim(const Grammar& g) {
  auto productive = productive_set(g);
  std::vector<bool> keep = productive;
  keep[static_cast<std::size_t>(g.start())] = true;
  Grammar step = restrict(g, keep);
  // Unproductive start: the only productions left may still mention it.
  if (!productive[static_cast<std::size_t>(g.start())]) {
    std::vector<Production> none;
    step = Grammar(step.alphabet(), {step.nonterminal_name(step.start())}, 0, none, g.unambiguity());
  }
  std::vector<bool> reach(static_cast<std::size_t>(step.nonterminal_count()), false);
  std::vector<int> stack{step.start()};
  reach[static_cast<std::size_t>(step.start())] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const auto& p : step.productions()) {
      if (p.head != x) continue;
      for (const auto& s : p.body)
        if (!s.terminal && !reach[static_cast<std::size_t>(s.index)]) {
          reach[static_cast<std::size_t>(s.index)] = true;
          stack.push_back(s.index);
        }
    }
  }
  TrimResult out{restrict(step, reach), {}};
  std::set<std::string> kept(out.grammar.nonterminals().begin(), out.grammar.nonterminals().end());
  for (const auto& n : g.nonterminals())
    if (!kept.count(n)) out.removed.push_back(n);
  return out;
}

Grammar start_first(const Grammar& g) {
  if (g.start() == 0) return g;
  const int k = g.nonterminal_count();
  std::vector<int> order{g.start()};
  for (int x = 0; x < k; ++x)
    if (x != g.start()) order.push_back(x);
  std::vector<int> remap(static_cast<std::size_t>(k));
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) {
    remap[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
    names.push_back(g.nonterminal_name(order[static_cast<std::size_t>(i)]));
  }
  std::vector<Production> prods;
  for (const auto& p : g.productions()) {
    Production q{remap[static_cast<std::size_t>(p.head)], p.body};
    for (auto& s : q.body)
      if (!s.terminal) s.index = remap[static_cast<std::size_t>(s.index)];
    prods.push_back(std::move(q));
  }
  return Grammar(g.alphabet(), std::move(names), 0, std::move(prods), g.unambiguity());
}

}  // namespace ucfg
