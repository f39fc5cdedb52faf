#include <filesystem>
#include <functional>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ucfg/automaton.hpp"
#include "ucfg/derivations.hpp"
#include "ucfg/error.hpp"
#include "ucfg/universality.hpp"

using namespace ucfg;

namespace {

const char* kUniversal = "alphabet: a b\nstart: S\nunambiguity: claimed\nS -> eps | a S | b S\n";
const char* kDyck = "alphabet: a b\nstart: S\nunambiguity: claimed\nS -> eps | a S b S\n";
const char* kZ3 = "/usr/local/bin/z3";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::backend;
}

void each_word(int sigma, int max_len, const std::function<void(const Word&)>& f) {
  for (int n = 0; n <= max_len; ++n) {
    Word w(static_cast<std::size_t>(n), 0);
    while (true) {
      f(w);
      int i = n - 1;
      while (i >= 0 && w[static_cast<std::size_t>(i)] == sigma - 1) w[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++w[static_cast<std::size_t>(i)];
    }
  }
}

}  // namespace

TEST_CASE("universal grammar is bounded-universal") {
  auto g = parse_grammar(kUniversal);
  auto r = decide_universality(g);
  CHECK(r.kind == UniversalityReport::Kind::universal_bounded);
  CHECK(verdict_line(r, g.alphabet()) == "UNIVERSAL-BOUNDED(32)");
  REQUIRE(r.counts.size() == 33);
  CHECK(r.counts[32] == BigInt(1) << 32);
  CHECK(!r.first_gap);
  REQUIRE(r.measure);
  CHECK(r.measure->interval.hi >= 1);
}

TEST_CASE("Dyck grammar misses b") {
  auto g = parse_grammar(kDyck);
  auto r = decide_universality(g);
  CHECK(r.kind == UniversalityReport::Kind::not_universal);
  REQUIRE(r.witness);
  CHECK(r.witness->size() == 1);
  CHECK(verdict_line(r, g.alphabet()) == "NOT-UNIVERSAL(b)");
  CHECK(r.first_gap == 1);
}

TEST_CASE("doubling fixtures") {
  for (int n = 1; n <= 4; ++n) {
    INFO("n = ", n);
    const unsigned long len = 1UL << n;
    auto y = parse_grammar(oracle::doubling_family(n, 'Y'));
    auto ry = decide_universality(y);
    CHECK(ry.kind == UniversalityReport::Kind::not_universal);
    REQUIRE(ry.witness);
    CHECK(*ry.witness == Word(len, 0));
    CHECK(ry.first_gap == static_cast<int>(len));
    CHECK(count_derivations(y, *ry.witness).count == 0);
    for (unsigned long k = 0; k < len; ++k) CHECK(count_derivations(y, Word(k, 0)).count == 1);

    auto x = parse_grammar(oracle::doubling_family(n, 'X'));
    UniversalityConfig cfg;
    cfg.measure_tol = Rational(1, 1) / Rational(BigInt(1) << 80);
    auto rx = decide_universality(x, cfg);
    CHECK(verdict_line(rx, x.alphabet()) == "NOT-UNIVERSAL(eps)");
  }
}

TEST_CASE("ambiguous grammars are rejected") {
  auto claimed = parse_grammar("alphabet: a\nstart: S\nunambiguity: claimed\nS -> eps | a S | S a\n");
  CHECK(kind_of([&] { decide_universality(claimed); }) == ErrorKind::not_unambiguous);
  auto unclaimed = claimed.with_status(UnambiguityStatus{});
  CHECK(kind_of([&] { decide_universality(unclaimed); }) == ErrorKind::not_unambiguous);
  UniversalityConfig strict;
  strict.unambiguity_check = -1;
  auto plain = parse_grammar("alphabet: a b\nstart: S\nS -> eps | a S | b S\n");
  CHECK(kind_of([&] { decide_universality(plain, strict); }) == ErrorKind::not_unambiguous);
  auto r = decide_universality(plain);
  CHECK(r.kind == UniversalityReport::Kind::universal_bounded);
  CHECK(r.assumed == UnambiguityStatus::verified(8));
  CHECK(kind_of([&] {
          UniversalityConfig bad;
          bad.bound = -1;
          decide_universality(plain, bad);
        }) == ErrorKind::precondition);
}

TEST_CASE("random short-GNF grammars agree with an exhaustive census") {
  std::mt19937_64 rng(4242);
  int gaps = 0, full = 0;
  for (int iter = 0; iter < 120; ++iter) {
    auto g = oracle::random_short_gnf(rng, 4);
    auto cen = oracle::census(g, 8);
    if (cen.max_trees > 1) continue;
    g = g.with_status(UnambiguityStatus::claimed());
    INFO(print_grammar(g));
    UniversalityConfig cfg;
    cfg.bound = 8;
    UniversalityReport r;
    try {
      r = decide_universality(g, cfg);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_unambiguous);
      continue;
    }
    int shortest = -1;
    BigInt all = 1;
    for (int m = 0; m <= 8; ++m, all *= 2) {
      CHECK(r.counts[static_cast<std::size_t>(m)] == cen.words[static_cast<std::size_t>(m)]);
      if (shortest < 0 && cen.words[static_cast<std::size_t>(m)] < all) shortest = m;
    }
    if (shortest >= 0) {
      ++gaps;
      CHECK(r.kind == UniversalityReport::Kind::not_universal);
      REQUIRE(r.witness);
      CHECK(static_cast<int>(r.witness->size()) == shortest);
      CHECK(oracle::short_gnf_trees(g, *r.witness) == 0);
    } else {
      ++full;
      CHECK(r.kind != UniversalityReport::Kind::undecided);
      if (r.kind == UniversalityReport::Kind::not_universal) CHECK(!r.witness);
    }
  }
  CHECK(gaps > 10);
  MESSAGE(full, " corpus grammars without a gap up to 8");

  for (const char* text : {"alphabet: a b\nstart: S\nS -> eps | E S\nE -> a | b\n",
                           "alphabet: a b\nstart: S\nS -> eps | a S | b U\nU -> eps | a S | b U\n",
                           "alphabet: a b\nstart: S\nS -> eps | a S | b T\nT -> S\n",
                           "alphabet: a b c\nstart: S\nS -> eps | a S | b S | c S\n"}) {
    auto g = parse_grammar(text);
    INFO(text);
    UniversalityConfig cfg;
    cfg.bound = 10;
    auto r = decide_universality(g, cfg);
    CHECK(verdict_line(r, g.alphabet()) == "UNIVERSAL-BOUNDED(10)");
    CHECK(r.assumed == UnambiguityStatus::verified(8));
  }
}

TEST_CASE("SMT certification of the difference sequence") {
  if (!std::filesystem::exists(kZ3)) {
    MESSAGE("z3 not found; skipped");
    return;
  }
  UniversalityConfig cfg;
  cfg.bound = 12;
  cfg.backend = SmtBackend{kZ3, 20};
  auto g = parse_grammar(kUniversal);
  auto r = decide_universality(g, cfg);
  CHECK(verdict_line(r, g.alphabet()) == "UNIVERSAL-CERTIFIED");
  auto d = parse_grammar(kDyck);
  CHECK(verdict_line(decide_universality(d, cfg), d.alphabet()) == "NOT-UNIVERSAL(b)");
}

TEST_CASE("NFA inclusion in a UCFG") {
  auto dyck = parse_grammar(kDyck);
  auto sigma = dyck.alphabet();

  auto all = decide_nfa_in_ucfg(universal_automaton(sigma), dyck);
  CHECK(all.kind == UcfgInclusionReport::Kind::fails);
  REQUIRE(all.witness);
  CHECK(all.witness->size() <= 3);
  CHECK(!oracle::dyck(*all.witness));
  REQUIRE(all.lifted_witness);
  CHECK(all.lifted_witness->size() == all.witness->size());
  CHECK(!all.provenance.steps.empty());

  CHECK(decide_nfa_in_ucfg(empty_automaton(sigma), dyck).kind == UcfgInclusionReport::Kind::holds_bounded);
  CHECK(decide_nfa_in_ucfg(universal_automaton(sigma), parse_grammar(kUniversal)).kind ==
        UcfgInclusionReport::Kind::holds_bounded);

  std::mt19937_64 rng(99);
  int fails = 0, holds = 0;
  for (int iter = 0; iter < 60; ++iter) {
    auto a = oracle::random_dfa(rng, 3);
    INFO(print_automaton(a));
    UniversalityConfig cfg;
    cfg.bound = 12;
    auto r = decide_nfa_in_ucfg(a, dyck, cfg);
    std::optional<Word> brute;
    each_word(2, 10, [&](const Word& w) {
      if (!brute && accepts(a, w) && !oracle::dyck(w)) brute = w;
    });
    if (r.kind == UcfgInclusionReport::Kind::fails) {
      ++fails;
      REQUIRE(r.witness);
      CHECK(accepts(a, *r.witness));
      CHECK(!oracle::dyck(*r.witness));
      if (brute) CHECK(r.witness->size() <= brute->size());
    } else {
      ++holds;
      CHECK(r.kind == UcfgInclusionReport::Kind::holds_bounded);
      CHECK(!brute);
    }
  }
  CHECK(fails > 5);
  CHECK(holds > 5);
}
