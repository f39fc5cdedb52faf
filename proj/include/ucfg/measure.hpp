#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ucfg/automaton.hpp"
#include "ucfg/grammar.hpp"
#include "ucfg/lfp.hpp"

namespace ucfg {

/// (1/(n+1))^{|w|+1}.
Rational word_measure(const Word& w, int n);
Rational word_measure(std::size_t length, int n);

struct Measure {
  enum class Kind { exact, interval, estimate };
  Kind kind = Kind::exact;
  Rational value;            // exact
  IntervalRational interval;  // interval
  std::string status;         // interval: lfp status
  double mean = 0, half_width = 0, confidence = 0.99;  // estimate
  double lower = 0, upper = 0;                          // Wilson bounds
  std::uint64_t samples = 0, seed = 0, aborted = 0;
};

/// Exact measure of an unambiguous automaton: solves z = acc + T z / (n+1) over
/// the trimmed automaton, component by component. Throws Error(not_unambiguous).
Rational regular_measure_exact(const Automaton& a);

/// Interval containing μ(L(g)) for a short-GNF grammar whose unambiguity is
/// claimed or verified, via the least fixpoint at x = 1/(n+1).
/// Throws Error(not_short_gnf) or Error(not_unambiguous).
Measure ucfg_measure(const Grammar& g, const Rational& tol, int max_iter = 400);

enum class CompareOp { le, lt, gt, ge };
const char* to_string(CompareOp op);
CompareOp parse_compare_op(std::string_view s);

struct ComparisonResult {
  enum class Kind { holds, fails, undecided };
  Kind kind = Kind::undecided;
  std::optional<Word> witness;  // a non-member when ε = 1 fails
  Measure measure;
  std::string reason;
};
const char* to_string(ComparisonResult::Kind k);

ComparisonResult compare_measure(const Automaton& a, CompareOp op, const Rational& eps);

struct CompareConfig {
  Rational tol = Rational(1, 1) / Rational(BigInt(1) << 40);
  Rational min_tol = Rational(1, 1) / Rational(BigInt(1) << 320);  // tol is squared down to this
  int search_bound = 16;  // length counts up to here refine the interval; witness search when ε = 1
};
ComparisonResult compare_measure(const Grammar& g, CompareOp op, const Rational& eps, const CompareConfig& cfg = {});

/// Coin-flip sampling: each step picks one of n letters or stop, uniformly.
/// Samples longer than 10^4 letters are abandoned and counted in `aborted`.
Measure monte_carlo_measure(const Automaton& a, std::uint64_t samples, std::uint64_t seed);
Measure monte_carlo_measure(const Grammar& g, std::uint64_t samples, std::uint64_t seed);

/// A shortest word of Σ^{<= max_len} outside L(g), for a short-GNF grammar with
/// trusted unambiguity, found by descending along per-prefix length counts. At
/// each step a letter whose prefix has no extension in L(g) is preferred, then
/// the first letter with a deficit. Throws Error(not_unambiguous) if the counts
/// contradict the claim.
std::optional<Word> find_missing_word(const Grammar& g, int max_len);

}  // namespace ucfg
