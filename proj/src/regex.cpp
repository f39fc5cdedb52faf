#include "ucfg/regex.hpp"

#include <functional>
#include <map>
#include <set>

namespace ucfg {

Regex Regex::none() { return Regex(std::make_shared<const Node>(Node{Kind::empty, 0, {}})); }
Regex Regex::eps() { return Regex(std::make_shared<const Node>(Node{Kind::epsilon, 0, {}})); }
Regex Regex::sym(Letter a) { return Regex(std::make_shared<const Node>(Node{Kind::letter, a, {}})); }
Regex Regex::alt(Regex a, Regex b) {
  return Regex(std::make_shared<const Node>(Node{Kind::alt, 0, {std::move(a), std::move(b)}}));
}
Regex Regex::cat(Regex a, Regex b) {
  return Regex(std::make_shared<const Node>(Node{Kind::concat, 0, {std::move(a), std::move(b)}}));
}
Regex Regex::star(Regex a) { return Regex(std::make_shared<const Node>(Node{Kind::star, 0, {std::move(a)}})); }

Regex Regex::alt_all(const std::vector<Regex>& xs) {
  if (xs.empty()) return none();
  Regex r = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) r = alt(xs[i], r);
  return r;
}

Regex Regex::cat_all(const std::vector<Regex>& xs) {
  if (xs.empty()) return eps();
  Regex r = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) r = cat(xs[i], r);
  return r;
}

Regex Regex::power(const Regex& e, int k) { return cat_all(std::vector<Regex>(static_cast<std::size_t>(k), e)); }

Regex Regex::with_unambiguous(bool flag) const {
  Regex r = *this;
  r.unambiguous_ = flag;
  return r;
}

int Regex::size() const {
  int s = 1;
  for (const auto& k : node_->kids) s += k.size();
  return s;
}

std::string Regex::to_string(const Alphabet& sigma) const {
  switch (kind()) {
    case Kind::empty: return "∅";
    case Kind::epsilon: return "eps";
    case Kind::letter: return sigma.name(letter());
    case Kind::alt: return "(" + left().to_string(sigma) + "|" + right().to_string(sigma) + ")";
    case Kind::concat: {
      auto l = left().to_string(sigma), r = right().to_string(sigma);
      return l + (sigma.compact() ? "" : " ") + r;
    }
    case Kind::star: {
      auto inner = left().to_string(sigma);
      bool atomic = left().kind() == Kind::letter || left().kind() == Kind::alt;
      return (atomic ? inner : "(" + inner + ")") + "*";
    }
  }
  return "";
}

namespace {

struct Glushkov {
  std::vector<Letter> letters;  // position -> letter
  std::vector<std::vector<int>> follow;

  struct Info {
    bool nullable;
    std::vector<int> first, last;
  };

  Info build(const Regex& e) {
    switch (e.kind()) {
      case Regex::Kind::empty: return {false, {}, {}};
      case Regex::Kind::epsilon: return {true, {}, {}};
      case Regex::Kind::letter: {
        int p = static_cast<int>(letters.size());
        letters.push_back(e.letter());
        follow.emplace_back();
        return {false, {p}, {p}};
      }
      case Regex::Kind::alt: {
        Info a = build(e.left()), b = build(e.right());
        Info out{a.nullable || b.nullable, a.first, a.last};
        out.first.insert(out.first.end(), b.first.begin(), b.first.end());
        out.last.insert(out.last.end(), b.last.begin(), b.last.end());
        return out;
      }
      case Regex::Kind::concat: {
        Info a = build(e.left()), b = build(e.right());
        for (int p : a.last)
          for (int q : b.first) follow[static_cast<std::size_t>(p)].push_back(q);
        Info out{a.nullable && b.nullable, a.first, b.last};
        if (a.nullable) out.first.insert(out.first.end(), b.first.begin(), b.first.end());
        if (b.nullable) out.last.insert(out.last.begin(), a.last.begin(), a.last.end());
        return out;
      }
      case Regex::Kind::star: {
        Info a = build(e.left());
        for (int p : a.last)
          for (int q : a.first) follow[static_cast<std::size_t>(p)].push_back(q);
        return {true, a.first, a.last};
      }
    }
    return {};
  }
};

}  // namespace

Automaton regex_to_nfa(const Regex& e, const Alphabet& sigma) {
  Glushkov g;
  auto info = g.build(e);
  const int n = static_cast<int>(g.letters.size());
  std::vector<std::string> names{"q0"};
  for (int p = 0; p < n; ++p) names.push_back("p" + std::to_string(p + 1));
  std::vector<Transition> ts;
  for (int p : info.first) ts.push_back({0, g.letters[static_cast<std::size_t>(p)], p + 1, 0});
  for (int p = 0; p < n; ++p)
    for (int q : g.follow[static_cast<std::size_t>(p)]) ts.push_back({p + 1, g.letters[static_cast<std::size_t>(q)], q + 1, 0});
  std::vector<int> acc;
  if (info.nullable) acc.push_back(0);
  for (int p : info.last) acc.push_back(p + 1);
  Automaton a(sigma, names, {0}, acc, ts);
  return e.unambiguous() ? classify(a) : a;
}

BigInt count_parses(const Regex& e, const Word& w) {
  std::map<std::tuple<const void*, int, int>, BigInt> memo;
  std::function<BigInt(const Regex&, int, int)> go = [&](const Regex& r, int i, int j) -> BigInt {
    switch (r.kind()) {
      case Regex::Kind::empty: return 0;
      case Regex::Kind::epsilon: return i == j ? 1 : 0;
      case Regex::Kind::letter: return (j == i + 1 && w[static_cast<std::size_t>(i)] == r.letter()) ? 1 : 0;
      default: break;
    }
    auto key = std::make_tuple(static_cast<const void*>(&r.left()), i * 100003 + j, static_cast<int>(r.kind()));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    BigInt total = 0;
    if (r.kind() == Regex::Kind::alt) {
      total = go(r.left(), i, j) + go(r.right(), i, j);
    } else if (r.kind() == Regex::Kind::concat) {
      for (int k = i; k <= j; ++k) {
        BigInt a = go(r.left(), i, k);
        if (a != 0) total += a * go(r.right(), k, j);
      }
    } else {
      if (i == j) {
        total = 1;
      } else {
        for (int k = i + 1; k <= j; ++k) {
          BigInt a = go(r.left(), i, k);
          if (a != 0) total += a * go(r, k, j);
        }
      }
    }
    memo.emplace(key, total);
    return total;
  };
  return go(e, 0, static_cast<int>(w.size()));
}

}  // namespace ucfg
