#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucfg/derivations.hpp"
#include "ucfg/measure.hpp"
#include "ucfg/regex.hpp"

namespace ucfg {

/// Σ_{i=1..n} √d_i ∼ d_0 with n odd, n >= 3 and max d_i = (n+1)^{2h}.
struct SqrtSumInstance {
  BigInt d0;
  std::vector<BigInt> d;  // d_1..d_n
  CompareOp op = CompareOp::ge;
  int h = 0;
  BigInt dmax;                 // (n+1)^{2h}
  std::size_t original = 0;    // entries before padding
  BigInt original_d0;

  int n() const { return static_cast<int>(d.size()); }
};

/// Pads with entries 1 (raising d_0 by one each) until the count is odd and at
/// least 3 with one slot left, then appends (n+1)^{2h}, raising d_0 by
/// (n+1)^h. Instances already in shape come back unchanged.
SqrtSumInstance normalise_instance(const BigInt& d0, const std::vector<BigInt>& d, CompareOp op);

/// {"d0": 6, "d": [1, 4, 9], "op": ">="}; integers may also be decimal strings.
/// Throws Error(syntax) on malformed input.
SqrtSumInstance parse_instance_json(std::string_view text);

/// Unambiguous expression over a_1..a_m with coin-flip measure p/q in base n+1.
///
/// Words of length k are taken level by level as lexicographic intervals of
/// the still-free words, either alone or as cylinders wΣ_m^* when the cylinder
/// weight (n+1)/(n+1-m) keeps denominators inside (n+1)^*. Throws
/// Error(precondition) naming the violated bound, or when p/q lies in a gap of
/// the measures reachable with m letters.
Regex representation_regex(int n, int m, const BigInt& p, const BigInt& q, int ell);

struct ReductionOutput {
  Grammar grammar;  // X0, X_i, A, C_i and the C_i automaton states C<i>_<k>
  Grammar gnf;      // the same derivations in short GNF
  Rational eps;     // (n - d0/d)/(n+1)
  CompareOp measure_op = CompareOp::le;  // μ(L(G)) measure_op ε iff Σ√d_i op d0
  Rational a = make_rational(1, 2);
  std::vector<Rational> c;  // (d² - d_i)/(2d²)
  std::vector<Regex> c_regex;
  Regex a_regex = Regex::none();
  int ell = 0;  // c_i denominators divide (n+1)^ell
  int size = 0;  // productions plus body symbols of `grammar`
};

ReductionOutput build_reduction(const SqrtSumInstance& inst);

struct VerifyOptions {
  Rational tol = make_rational(1, 1000000);
  Rational measure_tol = Rational(1, 1) / Rational(BigInt(1) << 80);
  int unambiguity_bound = 8;  // < 0 skips the check
  int sqrt_bits = 256;
  std::uint64_t mc_samples = 20000;  // 0 skips the sampled language measure
  std::uint64_t mc_seed = 1;
};

struct VerifyReport {
  IntervalRational measure;            // derivation-weighted; equals μ(L(G)) only if G is unambiguous
  IntervalRational direct;             // (n - Σ√d_i/d)/(n+1), exact when every d_i is a square
  bool direct_exact = false;
  bool agree = false;                  // within tol
  std::vector<Rational> residuals;     // x_i - c_i - x_i²/2, or its rational part when √d_i is irrational
  std::vector<bool> residual_exact;
  bool residuals_zero = false;
  std::vector<bool> c_measure_exact;   // μ(C_i) == c_i by the linear solve
  bool a_measure_exact = false;
  bool alphabet_ok = false;            // no a_n in C_i or A; A has single letters
  std::vector<IntervalRational> x;     // μ(X_i)
  bool fixpoint_ok = false;            // μ(X_i) = c_i + μ(X_i)²/2 within tol
  ComparisonResult comparison;         // μ(L(G)) measure_op ε
  std::optional<bool> direct_verdict;  // Σ√d_i op d0, when decidable at sqrt_bits
  bool verdict_matches = false;        // comparison agrees with direct_verdict
  std::optional<bool> weight_verdict;  // `measure` measure_op ε, when the interval decides it
  std::optional<UnambiguityCheck> unambiguity;
  std::optional<Measure> language_estimate;  // sampled μ(L(G)), counting each word once
};

VerifyReport verify_reduction(const ReductionOutput& out, const SqrtSumInstance& inst, const VerifyOptions& opt = {});

/// Metadata document: ε as a fraction, constants, sizes, and the instance.
std::string reduction_json(const ReductionOutput& out, const SqrtSumInstance& inst);

}  // namespace ucfg
