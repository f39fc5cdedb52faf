#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ucfg/grammar.hpp"
#include "ucfg/measure.hpp"
#include "ucfg/reductions.hpp"
#include "ucfg/zeroness.hpp"

namespace ucfg {

struct UniversalityConfig {
  int bound = 32;  // length counts compared up to here
  Rational measure_tol = Rational(1, 1) / Rational(BigInt(1) << 40);
  int unambiguity_check = 8;  // bounded check for grammars without a claim; < 0 refuses them
  bool measure = true;
  std::optional<SmtBackend> backend;
  SmtOptions smt;
};

struct UniversalityReport {
  enum class Kind { not_universal, universal_bounded, universal_certified, undecided };
  Kind kind = Kind::undecided;
  std::optional<Word> witness;
  int bound = 0;
  std::optional<int> first_gap;       // least n with f(n) < |Σ|^n
  std::vector<BigInt> counts;         // f(0..bound) of the short-GNF grammar
  std::optional<Measure> measure;
  std::optional<ZeronessVerdict> smt;
  UnambiguityStatus assumed;          // what the counting relied on
  std::string reason;
  int gnf_nonterminals = 0, gnf_productions = 0;
};
const char* to_string(UniversalityReport::Kind k);

/// "NOT-UNIVERSAL(b)", "UNIVERSAL-BOUNDED(32)", "UNIVERSAL-CERTIFIED" or "UNDECIDED".
std::string verdict_line(const UniversalityReport& r, const Alphabet& sigma);

/// Short GNF, length counts against |Σ|^n up to the bound, a witness by prefix
/// descent at the first gap, the measure interval, and SMT zeroness of the
/// difference sequence when a backend is configured.
///
/// Grammars without a claim are checked for ambiguity up to unambiguity_check
/// first. Throws Error(not_unambiguous) when a count exceeds |Σ|^n or the
/// bounded check finds two derivations.
UniversalityReport decide_universality(const Grammar& g, const UniversalityConfig& cfg = {});

struct UcfgInclusionReport {
  enum class Kind { fails, holds_bounded, holds_certified, undecided };
  Kind kind = Kind::undecided;
  std::optional<Word> witness;        // over the original alphabet
  std::optional<Word> lifted_witness;
  Alphabet lifted;                    // transition letters of the determinised lhs
  UniversalityReport universality;
  Provenance provenance;
};
const char* to_string(UcfgInclusionReport::Kind k);

/// L(a) ⊆ L(g): builds the lifted universality instance and runs the pipeline;
/// a missing lifted word projects to a word of L(a) outside L(g).
UcfgInclusionReport decide_nfa_in_ucfg(const Automaton& a, const Grammar& g, const UniversalityConfig& cfg = {});

}  // namespace ucfg
