#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ucfg/automaton.hpp"
#include "ucfg/error.hpp"
#include "ucfg/regex.hpp"

using namespace ucfg;

namespace {

const char* kAstar = "alphabet: a b\nstates: p\ninitial: p\naccepting: p\np a p\n";

bool ambiguous_by_enumeration(const Automaton& a, int n) {
  for (int len = 0; len <= n; ++len) {
    bool found = false;
    for_each_word(a.alphabet().size(), len, [&](const Word& w) { found = found || oracle::runs(a, w) > 1; });
    if (found) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("automaton text round-trips and classifies") {
  const char* texts[] = {
      kAstar,
      "alphabet: a b\nstates: p q r\ninitial: p q\naccepting: r\np a r\nq a r\nr b r\nr b r\n",
      "alphabet: x\nstates: s\ninitial:\naccepting:\n",
  };
  for (const char* t : texts) {
    auto a = parse_automaton(t);
    CHECK(print_automaton(a) == t);
    CHECK(parse_automaton(print_automaton(a)) == a);
  }
  auto dfa = parse_automaton(kAstar);
  CHECK(dfa.automaton_class() == AutomatonClass::DFA);
  CHECK_FALSE(dfa.total());
  auto nfa = parse_automaton(texts[1]);
  CHECK(nfa.automaton_class() == AutomatonClass::NFA);
  CHECK(oracle::runs(nfa, parse_word(nfa.alphabet(), "abb")) == 8);
  CHECK(count_runs(nfa, parse_word(nfa.alphabet(), "abb")) == 8);
}

TEST_CASE("automaton parse errors") {
  auto kind = [](const char* t) {
    try {
      parse_automaton(t);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::backend;
  };
  CHECK(kind("alphabet: a\nstates: p\ninitial: p\naccepting: p\np c p\n") == ErrorKind::undeclared_symbol);
  CHECK(kind("alphabet: a\nstates: p\ninitial: r\naccepting: p\n") == ErrorKind::undeclared_symbol);
  CHECK(kind("alphabet: a\nstates: p\ninitial: p\naccepting: p\np a\n") == ErrorKind::syntax);
}

TEST_CASE("check_unambiguous_nfa basics") {
  CHECK(check_unambiguous_nfa(parse_automaton(kAstar)).unambiguous);
  auto two = parse_automaton("alphabet: a\nstates: s t u\ninitial: s\naccepting: u\ns a u\ns a t\nt a u\nt a t\n");
  auto r = check_unambiguous_nfa(two);
  CHECK(r.unambiguous == !ambiguous_by_enumeration(two, 8));
  auto par = parse_automaton("alphabet: a\nstates: s t u f\ninitial: s\naccepting: f\ns a f\ns a f\n");
  auto p = check_unambiguous_nfa(par);
  REQUIRE_FALSE(p.unambiguous);
  CHECK(*p.witness == Word{0});
  auto two_init = parse_automaton("alphabet: a\nstates: s t\ninitial: s t\naccepting: s t\n");
  CHECK(*check_unambiguous_nfa(two_init).witness == Word{});
}

TEST_CASE("check_unambiguous_nfa matches run enumeration on random NFAs") {
  std::mt19937_64 rng(77);
  int agreed = 0, longer = 0;
  for (int iter = 0; iter < 500; ++iter) {
    auto a = oracle::random_nfa(rng, 5, 2, 0.25);
    auto r = check_unambiguous_nfa(a);
    bool oracle_amb = ambiguous_by_enumeration(a, 8);
    if (oracle_amb) {
      CHECK_FALSE(r.unambiguous);
    }
    if (!r.unambiguous) {
      CHECK(oracle::runs(a, *r.witness) >= 2);
      if (r.witness->size() > 8) ++longer;
      // shortest: nothing shorter is ambiguous
      if (r.witness->size() > 0) CHECK_FALSE(ambiguous_by_enumeration(a, static_cast<int>(r.witness->size()) - 1));
    }
    if (r.unambiguous == !oracle_amb) ++agreed;
  }
  CHECK(agreed + longer == 500);
}

TEST_CASE("dfa_complement") {
  auto astar = parse_automaton(kAstar);
  auto c = dfa_complement(astar);
  CHECK(c.is_deterministic());
  CHECK(c.total());
  for (int n = 0; n <= 8; ++n)
    for_each_word(2, n, [&](const Word& w) {
      bool only_a = std::all_of(w.begin(), w.end(), [](int x) { return x == 0; });
      CHECK(accepts(c, w) == !only_a);
    });
  auto full = universal_automaton(Alphabet::from_chars("ab"));
  CHECK_FALSE(shortest_accepted(dfa_complement(full)).has_value());
  CHECK_THROWS_AS(dfa_complement(parse_automaton("alphabet: a\nstates: p\ninitial: p\naccepting: p\np a p\np a p\n")), Error);

  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 100; ++iter) {
    auto d = oracle::random_dfa(rng, 4);
    auto cc = dfa_complement(dfa_complement(d));
    auto c1 = dfa_complement(d);
    for (int n = 0; n <= 8; ++n)
      for_each_word(2, n, [&](const Word& w) {
        CHECK((accepts(d, w) != accepts(c1, w)));
        CHECK(accepts(cc, w) == accepts(d, w));
      });
  }
}

TEST_CASE("subset_oracle_inclusion") {
  Alphabet ab = Alphabet::from_chars("ab");
  auto astar = parse_automaton(kAstar);
  auto full = universal_automaton(ab);
  CHECK(subset_oracle_inclusion(astar, astar));
  CHECK(subset_oracle_inclusion(astar, full));
  CHECK_FALSE(subset_oracle_inclusion(full, astar));
  CHECK(*inclusion_counterexample(full, astar) == Word{1});
  CHECK_THROWS_AS(subset_oracle_inclusion(astar, universal_automaton(Alphabet::from_chars("abc"))), Error);

  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 300; ++iter) {
    auto a = oracle::random_nfa(rng, 3), b = oracle::random_nfa(rng, 3);
    auto cex = inclusion_counterexample(a, b);
    if (cex) {
      CHECK(accepts(a, *cex));
      CHECK_FALSE(accepts(b, *cex));
    } else {
      for (int n = 0; n <= 8; ++n)
        for_each_word(2, n, [&](const Word& w) {
          if (accepts(a, w)) CHECK(accepts(b, w));
        });
    }
  }
}

TEST_CASE("determinise and intersect preserve languages") {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 100; ++iter) {
    auto a = oracle::random_nfa(rng, 4), b = oracle::random_nfa(rng, 4);
    auto d = determinise(a);
    CHECK(d.is_deterministic());
    CHECK(d.total());
    auto p = intersect(a, b);
    auto t = trim(a);
    for (int n = 0; n <= 7; ++n)
      for_each_word(2, n, [&](const Word& w) {
        CHECK(accepts(d, w) == accepts(a, w));
        CHECK(accepts(p, w) == (accepts(a, w) && accepts(b, w)));
        CHECK(count_runs(t, w) == oracle::runs(a, w));
      });
    auto pc = path_counts(a, 6);
    for (int n = 0; n <= 6; ++n) {
      BigInt s = 0;
      for_each_word(2, n, [&](const Word& w) { s += oracle::runs(a, w); });
      CHECK(pc[static_cast<std::size_t>(n)] == s);
    }
  }
}

TEST_CASE("regex_to_nfa") {
  Alphabet ab = Alphabet::from_chars("ab");
  auto eps = regex_to_nfa(Regex::eps(), ab);
  CHECK(accepts(eps, {}));
  CHECK_FALSE(accepts(eps, {0}));
  auto all = regex_to_nfa(Regex::star(Regex::alt(Regex::sym(0), Regex::sym(1))).with_unambiguous(true), ab);
  for (int n = 0; n <= 8; ++n) for_each_word(2, n, [&](const Word& w) { CHECK(accepts(all, w)); });
  CHECK(all.automaton_class() != AutomatonClass::NFA);
  CHECK_FALSE(shortest_accepted(regex_to_nfa(Regex::none(), ab)).has_value());
}

TEST_CASE("position automaton runs equal parse counts on random regexes") {
  std::mt19937_64 rng(31);
  std::function<Regex(int)> gen = [&](int depth) -> Regex {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 5);
    switch (pick(rng)) {
      case 0: return Regex::sym(0);
      case 1: return Regex::sym(1);
      case 2: return std::bernoulli_distribution(0.2)(rng) ? Regex::eps() : Regex::sym(0);
      case 3: return Regex::alt(gen(depth - 1), gen(depth - 1));
      case 4: return Regex::cat(gen(depth - 1), gen(depth - 1));
      default: return Regex::star(gen(depth - 1));
    }
  };
  std::function<bool(const Regex&)> eps_unique = [&](const Regex& r) -> bool {
    if (count_parses(r, Word{}) > 1) return false;
    if (r.kind() == Regex::Kind::alt || r.kind() == Regex::Kind::concat) return eps_unique(r.left()) && eps_unique(r.right());
    if (r.kind() == Regex::Kind::star) return eps_unique(r.left());
    return true;
  };
  Alphabet ab = Alphabet::from_chars("ab");
  for (int iter = 0; iter < 200; ++iter) {
    Regex e = gen(4);
    auto a = regex_to_nfa(e, ab);
    for (int n = 0; n <= 6; ++n)
      for_each_word(2, n, [&](const Word& w) {
        CHECK(accepts(a, w) == oracle::matches(e, w));
        if (eps_unique(e)) CHECK(count_runs(a, w) == count_parses(e, w));
      });
  }
}
