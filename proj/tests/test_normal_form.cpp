#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/grammar.hpp"

using namespace ucfg;

namespace {

std::map<Word, std::uint64_t> counts_up_to(const Grammar& g, int n) {
  std::map<Word, std::uint64_t> out;
  for_each_word_with_count(g, n, [&](const Word& w, std::uint64_t c) {
    if (c) out[w] = c;
    return true;
  });
  return out;
}

}  // namespace

TEST_CASE("short GNF input is kept") {
  auto g = parse_grammar("alphabet: a b\nstart: S\nS -> eps | a S T\nT -> b S S | eps\n");
  REQUIRE(g.is_short_gnf());
  auto r = to_short_gnf(g);
  CHECK(r.grammar == g);
  CHECK(r.removed.empty());
}

TEST_CASE("Dyck grammar in short GNF keeps its word counts") {
  auto g = parse_grammar("alphabet: a b\nstart: S\nS -> eps | a S b S\n");
  auto s = to_short_gnf(g).grammar;
  CHECK(s.is_short_gnf());
  auto f = bounded_word_counts(s, 12);
  for (int n = 0; n <= 12; ++n) {
    BigInt expected = 0;
    for_each_word(2, n, [&](const Word& w) { expected += oracle::dyck(w) ? 1 : 0; });
    CHECK(f[static_cast<std::size_t>(n)] == expected);
  }
  CHECK(check_unambiguous_bounded(s, 12).ok);
}

TEST_CASE("right-linear universal grammar counts 2^n") {
  auto g = parse_grammar("alphabet: a b\nstart: S\nS -> eps | a S | b S\n");
  auto s = to_short_gnf(g).grammar;
  CHECK(s.is_short_gnf());
  auto f = bounded_word_counts(s, 16);
  for (int n = 0; n <= 16; ++n) CHECK(f[static_cast<std::size_t>(n)] == BigInt(1) << n);
}

TEST_CASE("ambiguity survives the conversion with exact multiplicities") {
  auto g = parse_grammar("alphabet: a\nstart: S\nS -> eps | a S | S a\n");
  auto s = to_short_gnf(g).grammar;
  CHECK(s.is_short_gnf());
  for (int n = 0; n <= 6; ++n) {
    Word w(static_cast<std::size_t>(n), 0);
    CHECK(count_derivations(s, w).count == count_derivations(g, w).count);
  }
}

TEST_CASE("left recursion and nullable chains") {
  auto g = parse_grammar(
      "alphabet: a b c\nstart: E\nE -> E a T | T\nT -> T b F | F\nF -> c | N c N\nN -> eps | N N2\nN2 -> eps\n");
  // N has infinitely many eps-trees through N -> N N2
  CHECK_THROWS_AS(to_short_gnf(g), Error);

  auto h = parse_grammar("alphabet: a b c\nstart: E\nE -> E a T | T\nT -> T b F | F\nF -> c | O c O\nO -> eps | b\n");
  auto s = to_short_gnf(h).grammar;
  CHECK(s.is_short_gnf());
  CHECK(counts_up_to(s, 7) == counts_up_to(h, 7));
}

TEST_CASE("cyclic unit chains are reported") {
  auto g = parse_grammar("alphabet: a\nstart: S\nS -> T | a\nT -> S | a\n");
  try {
    to_short_gnf(g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::cyclic_unit_chain);
  }
}

TEST_CASE("degenerate languages") {
  auto empty = to_short_gnf(parse_grammar("alphabet: a\nstart: S\nS -> a S | T\nT -> T\n")).grammar;
  CHECK(empty.is_short_gnf());
  CHECK(bounded_word_counts(empty, 5) == std::vector<BigInt>(6, 0));

  auto eps = to_short_gnf(parse_grammar("alphabet: a\nstart: S\nS -> A A\nA -> eps\n")).grammar;
  CHECK(eps.is_short_gnf());
  auto f = bounded_word_counts(eps, 4);
  CHECK(f[0] == 1);
  CHECK(f[1] == 0);

  auto t = to_short_gnf(parse_grammar("alphabet: a b\nstart: S\nS -> a | U\nU -> b U\nV -> a\n"));
  CHECK(t.removed == std::vector<std::string>{"U", "V"});
}

TEST_CASE("random corpus: per-word derivation counts preserved up to length 12") {
  std::mt19937_64 rng(2024);
  int converted = 0;
  for (int iter = 0; converted < 200 && iter < 2000; ++iter) {
    auto g = oracle::random_grammar(rng);
    Grammar s;
    try {
      s = to_short_gnf(g).grammar;
    } catch (const Error& e) {
      // only infinitely ambiguous inputs may be rejected
      CHECK(e.kind() == ErrorKind::cyclic_unit_chain);
      CHECK(oracle::infinitely_ambiguous(g));
      continue;
    }
    ++converted;
    CHECK_FALSE(oracle::infinitely_ambiguous(g));
    CHECK(s.is_short_gnf());
    auto a = counts_up_to(g, 12), b = counts_up_to(s, 12);
    CHECK(a == b);
    // membership against the top-down oracle on short words
    for (int n = 0; n <= 5; ++n)
      for_each_word(2, n, [&](const Word& w) {
        BigInt expected;
        try {
          expected = oracle::trees(g, w);
        } catch (const oracle::Cyclic&) {
          return;
        }
        CHECK(accepts(s, w) == (expected > 0));
      });
  }
  CHECK(converted == 200);
}
