#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ucfg/convrec.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/measure.hpp"

using namespace ucfg;

namespace {

const char* kDyck = "alphabet: a b\nstart: S\nunambiguity: claimed\nS -> eps | a S T\nT -> b S E\nE -> eps\n";
const char* kUniversal = "alphabet: a b\nstart: S\nunambiguity: claimed\nS -> eps | a E S | b E S\nE -> eps\n";

Automaton star_a() { return parse_automaton("alphabet: a b\nstates: p\ninitial: p\naccepting: p\np a p\n"); }

// r = (3 - sqrt 5)/2 is the smaller root of r^2 - 3r + 1; compare without roots.
bool below_dyck(const Rational& q) { return 3 - 2 * q >= 0 && (3 - 2 * q) * (3 - 2 * q) >= 5; }
bool above_dyck(const Rational& q) { return 3 - 2 * q <= 0 || (3 - 2 * q) * (3 - 2 * q) <= 5; }

// NFA for L(a) L(b); b must have a single initial state.
Automaton concatenation(const Automaton& a, const Automaton& b) {
  const int off = a.state_count();
  const int b0 = b.initial().front();
  std::vector<std::string> names;
  for (const auto& s : a.states()) names.push_back("l" + s);
  for (const auto& s : b.states()) names.push_back("r" + s);
  std::vector<Transition> ts;
  for (const auto& t : a.transitions()) ts.push_back({t.from, t.letter, t.to, 0});
  for (const auto& t : b.transitions()) ts.push_back({t.from + off, t.letter, t.to + off, 0});
  for (int f : a.accepting())
    for (int id : b.out(b0)) {
      const auto& t = b.transitions()[static_cast<std::size_t>(id)];
      ts.push_back({f, t.letter, t.to + off, 0});
    }
  std::vector<int> acc;
  for (int f : b.accepting()) acc.push_back(f + off);
  if (b.is_accepting(b0))
    for (int f : a.accepting()) acc.push_back(f);
  std::vector<Transition> numbered;
  for (auto t : ts) {
    t.id = static_cast<int>(numbered.size());
    numbered.push_back(t);
  }
  return Automaton(a.alphabet(), names, a.initial(), acc, numbered);
}

}  // namespace

TEST_CASE("word measures") {
  CHECK(word_measure(Word{}, 2) == make_rational(1, 3));
  CHECK(word_measure(Word{0, 1}, 2) == make_rational(1, 27));
  CHECK(word_measure(Word{0}, 1) == make_rational(1, 4));
  CHECK(word_measure(std::size_t{4}, 3) == make_rational(1, 1024));
}

TEST_CASE("regular measures: anchors") {
  auto sigma = Alphabet::from_chars("ab");
  CHECK(regular_measure_exact(universal_automaton(sigma)) == 1);
  CHECK(regular_measure_exact(empty_automaton(sigma)) == 0);
  CHECK(regular_measure_exact(star_a()) == make_rational(1, 2));
  // ambiguous: two runs on every nonempty a-word
  auto amb = parse_automaton("alphabet: a\nstates: p q\ninitial: p\naccepting: q\np a q\np a p\nq a q\n");
  CHECK_THROWS_AS(regular_measure_exact(amb), Error);

  auto r = compare_measure(star_a(), CompareOp::ge, make_rational(1, 2));
  CHECK(r.kind == ComparisonResult::Kind::holds);
  CHECK(compare_measure(star_a(), CompareOp::gt, make_rational(1, 2)).kind == ComparisonResult::Kind::fails);
  auto one = compare_measure(star_a(), CompareOp::ge, 1);
  CHECK(one.kind == ComparisonResult::Kind::fails);
  REQUIRE(one.witness);
  CHECK(*one.witness == Word{1});
  CHECK(compare_measure(universal_automaton(sigma), CompareOp::ge, 1).kind == ComparisonResult::Kind::holds);
}

TEST_CASE("regular measures against the truncated series") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Automaton a = iter % 2 ? oracle::random_dfa(rng, 6, 2 + iter % 3 / 2) : oracle::random_nfa(rng, 4, 2, 0.25);
    if (!check_unambiguous_nfa(a).unambiguous) {
      CHECK_THROWS_AS(regular_measure_exact(a), Error);
      continue;
    }
    auto mu = regular_measure_exact(a);
    auto b = oracle::measure_series(a, 80);
    INFO(print_automaton(a), to_string(mu));
    CHECK(b.lo <= mu);
    CHECK(mu <= b.hi);
    CHECK(mu >= 0);
    CHECK(mu <= 1);
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("product law on unambiguous concatenations") {
  std::mt19937_64 rng(8);
  int pairs = 0, tries = 0;
  while (pairs < 50 && tries < 5000) {
    ++tries;
    auto l = oracle::random_dfa(rng, 3, 2, 0.6), m = oracle::random_dfa(rng, 3, 2, 0.6);
    auto lm = concatenation(l, m);
    if (!check_unambiguous_nfa(lm).unambiguous) continue;
    auto ml = regular_measure_exact(l), mm = regular_measure_exact(m);
    if (ml == 0 || mm == 0) continue;  // trivial pairs do not count
    ++pairs;
    CHECK(regular_measure_exact(lm) == 3 * ml * mm);
  }
  CHECK(pairs == 50);
}

TEST_CASE("Monte Carlo agrees with exact regular measures") {
  auto sigma = Alphabet::from_chars("ab");
  auto full = monte_carlo_measure(universal_automaton(sigma), 10000, 1);
  CHECK(full.mean == 1.0);
  CHECK(full.samples == 10000);
  CHECK(monte_carlo_measure(empty_automaton(sigma), 10000, 1).mean == 0.0);

  std::mt19937_64 rng(5);
  int outside = 0;
  for (int i = 0; i < 50; ++i) {
    auto a = oracle::random_dfa(rng, 5);
    double mu = to_double(regular_measure_exact(a));
    auto est = monte_carlo_measure(a, 100000, static_cast<std::uint64_t>(i));
    double sigma3 = 3 * std::sqrt(mu * (1 - mu) / 100000.0);
    INFO(print_automaton(a), " exact ", mu, " estimate ", est.mean);
    if (std::fabs(est.mean - mu) > sigma3) ++outside;
    CHECK(est.lower <= est.mean);
    CHECK(est.mean <= est.upper);
  }
  CHECK(outside == 0);

  auto a = oracle::random_dfa(rng, 5);
  auto x = monte_carlo_measure(a, 5000, 99), y = monte_carlo_measure(a, 5000, 99);
  CHECK(x.mean == y.mean);
  CHECK(x.seed == 99);
}

TEST_CASE("Dyck measure and comparisons") {
  auto g = parse_grammar(kDyck);
  auto m = ucfg_measure(g, Rational(1, 1000000));
  REQUIRE(m.kind == Measure::Kind::interval);
  CHECK(m.interval.width() <= Rational(1, 1000000));
  CHECK(below_dyck(m.interval.lo));
  CHECK(above_dyck(m.interval.hi));

  auto ge1 = compare_measure(g, CompareOp::ge, 1);
  CHECK(ge1.kind == ComparisonResult::Kind::fails);
  REQUIRE(ge1.witness);
  CHECK(format_word(g.alphabet(), *ge1.witness) == "b");

  auto lt = compare_measure(g, CompareOp::lt, make_rational(2, 5));
  CHECK(lt.kind == ComparisonResult::Kind::holds);
  CHECK(compare_measure(g, CompareOp::gt, make_rational(2, 5)).kind == ComparisonResult::Kind::fails);
  CHECK(compare_measure(g, CompareOp::ge, make_rational(1, 3)).kind == ComparisonResult::Kind::holds);

  auto mc = monte_carlo_measure(g, 100000, 2024);
  CHECK(std::fabs(mc.mean - (3 - std::sqrt(5.0)) / 2) <= mc.half_width);
}

TEST_CASE("grammar measure anchors and errors") {
  auto u = parse_grammar(kUniversal);
  auto m = ucfg_measure(u, Rational(1, 1 << 30));
  CHECK(m.interval.contains(1));
  // measure 1 is never claimed numerically
  auto c = compare_measure(u, CompareOp::ge, 1);
  CHECK(c.kind == ComparisonResult::Kind::undecided);
  CHECK(!c.witness);
  CHECK(compare_measure(u, CompareOp::gt, make_rational(99, 100)).kind == ComparisonResult::Kind::holds);

  auto empty = parse_grammar("alphabet: a b\nstart: S\nunambiguity: claimed\nS -> a S S\n");
  auto e = ucfg_measure(empty, Rational(1, 1000));
  CHECK(e.interval.lo == 0);
  CHECK(e.interval.hi == 0);
  auto ec = compare_measure(empty, CompareOp::ge, 1);
  CHECK(ec.kind == ComparisonResult::Kind::fails);
  REQUIRE(ec.witness);
  CHECK(ec.witness->empty());

  CHECK_THROWS_AS(ucfg_measure(parse_grammar("alphabet: a\nstart: S\nS -> eps | a S S\n"), 1), Error);
  CHECK_THROWS_AS(ucfg_measure(parse_grammar("alphabet: a\nstart: S\nunambiguity: claimed\nS -> a\n"), 1), Error);
  // ambiguous grammar claimed unambiguous: S -> eps | a S S | a S S
  auto liar = parse_grammar("alphabet: a\nstart: S\nunambiguity: claimed\nS -> eps | a S S | a S S\n");
  CHECK_THROWS_AS(compare_measure(liar, CompareOp::ge, make_rational(1, 2)), Error);
  CHECK(parse_compare_op(">=") == CompareOp::ge);
  CHECK_THROWS_AS(parse_compare_op("=>"), Error);
}

TEST_CASE("doubling family") {
  for (int n = 1; n <= 4; ++n) {
    INFO("n = ", n);
    const unsigned long len = 1UL << n;
    auto x = to_short_gnf(parse_grammar(oracle::doubling_family(n, 'X'))).grammar;
    auto y = to_short_gnf(parse_grammar(oracle::doubling_family(n, 'Y'))).grammar;
    Rational tight = Rational(1, 1) / Rational(BigInt(1) << 80);
    auto mx = ucfg_measure(x, tight);
    Rational expect_x = make_rational(1, 1) / Rational(pow(BigInt(2), len + 1));
    CHECK(mx.interval.contains(expect_x));
    CHECK(mx.interval.width() <= tight);
    auto my = ucfg_measure(y, tight);
    Rational expect_y = 1 - make_rational(1, 1) / Rational(pow(BigInt(2), len));
    CHECK(my.interval.contains(expect_y));
    CHECK(my.interval.width() <= tight);

    auto w = find_missing_word(y, 40);
    REQUIRE(w);
    CHECK(w->size() == len);
  }
}

TEST_CASE("missing words and measure bounds on a random corpus") {
  std::mt19937_64 rng(77);
  int nonuniversal = 0;
  for (int iter = 0; iter < 150; ++iter) {
    auto g = oracle::random_short_gnf(rng, 4);
    auto cen = oracle::census(g, 7);
    if (cen.max_trees > 1) continue;  // keep grammars unambiguous up to the census bound
    g = g.with_status(UnambiguityStatus::claimed());
    INFO(print_grammar(g));
    int shortest = -1;
    BigInt all = 1;
    for (int m = 0; m <= 7; ++m, all *= 2)
      if (cen.words[static_cast<std::size_t>(m)] < all) {
        shortest = m;
        break;
      }
    std::optional<Word> w;
    try {
      w = find_missing_word(g, 7);
    } catch (const Error& e) {
      // ambiguity beyond the census bound is the only acceptable reason
      CHECK(e.kind() == ErrorKind::not_unambiguous);
      continue;
    }
    if (shortest < 0) {
      CHECK(!w);
      continue;
    }
    REQUIRE(w);
    CHECK(static_cast<int>(w->size()) == shortest);
    CHECK(oracle::short_gnf_trees(g, *w) == 0);
    ++nonuniversal;

    // the difference sequence and the comparison agree
    auto diff = eval_prefix(universality_difference(g), 7)[0];
    int first = -1;
    for (int m = 0; m <= 7 && first < 0; ++m)
      if (diff[static_cast<std::size_t>(m)] != 0) first = m;
    CHECK(first == shortest);
    ComparisonResult c;
    try {
      c = compare_measure(g, CompareOp::ge, 1, {Rational(1, 1 << 20), 7});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_unambiguous);
      continue;
    }
    CHECK(c.kind == ComparisonResult::Kind::fails);
    CHECK(c.measure.interval.hi < 1);

    // partial sums stay below the upper bound
    Rational partial = 0, xm = make_rational(1, 3);
    for (int m = 0; m <= 7; ++m, xm /= 3) partial += Rational(cen.words[static_cast<std::size_t>(m)]) * xm;
    CHECK(partial <= c.measure.interval.hi);
  }
  CHECK(nonuniversal > 40);
}
