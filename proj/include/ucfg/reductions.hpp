#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ucfg/automaton.hpp"
#include "ucfg/grammar.hpp"

namespace ucfg {

/// A deterministic machine whose letters name the transitions of the source
/// automaton; h maps each transition letter back to the letter it reads.
struct LabeledMachine {
  Automaton machine;
  Alphabet original;
  std::vector<Letter> h;  // indexed by lifted letter

  const Alphabet& lifted() const { return machine.alphabet(); }
};

/// Totalises a (rejecting sink), merges several initial states into a fresh one,
/// then relabels every transition with its own letter "p:a:q#k".
LabeledMachine determinise_lhs(const Automaton& a);

Word project(const LabeledMachine& m, const Word& lifted_word);

/// Inverse homomorphic image h^{-1}(L(b)). Throws Error(alphabet_mismatch).
Automaton lift_rhs(const Automaton& b, const LabeledMachine& m);
Grammar lift_rhs(const Grammar& g, const LabeledMachine& m);

struct Provenance {
  std::string query;               // e.g. "nfa-in-ufa"
  std::string lhs_hash, rhs_hash;  // content hashes of the printed inputs
  std::vector<std::string> steps;
  int lifted_alphabet = 0;
};
std::string provenance_json(const Provenance& p);

struct UniversalityInstance {
  std::variant<Automaton, Grammar> target;
  Provenance provenance;
};

/// (rhs ∩ L(lhs)) ⊎ complement(lhs): universal iff L(lhs) ⊆ L(rhs).
/// lhs must be a DFA (Error(not_deterministic)); rhs must be a DFA/UFA or a grammar
/// whose unambiguity is claimed or verified (Error(not_unambiguous)).
UniversalityInstance inclusion_to_universality(const Automaton& lhs, const Automaton& rhs);
UniversalityInstance inclusion_to_universality(const Automaton& lhs, const Grammar& rhs);

/// Triple construction [p X q] for a short-GNF grammar and a DFA; keeps short GNF.
Grammar product_ucfg_dfa(const Grammar& g, const Automaton& dfa);

/// L(g) ∪ L(dfa) for disjoint languages; the DFA becomes right-linear productions
/// q <- b q' E. Overlap found among words of length <= check_length raises
/// Error(precondition).
Grammar disjoint_union(const Grammar& g, const Automaton& dfa, int check_length = 8);

struct UfaUniversality {
  enum class Kind { universal, not_universal, not_unambiguous } kind = Kind::universal;
  std::optional<Word> witness;  // missing word, or a word with two runs
  int checked_up_to = 0;        // lengths 0..s compared
  std::optional<int> first_gap;  // least n with f(n) < |Σ|^n
};
/// Exact: unambiguity by self-product, then accepted-path counts against |Σ|^n up to
/// the state count. The witness is the lexicographically first missing word of
/// the least deficient length.
UfaUniversality decide_ufa_universal(const Automaton& a);

struct InclusionVerdict {
  enum class Kind { holds, fails, not_unambiguous } kind = Kind::holds;
  std::optional<Word> witness;  // over the original alphabet
  Provenance provenance;
};
InclusionVerdict decide_nfa_in_ufa(const Automaton& a, const Automaton& b);

/// Universality instance over the lifted alphabet for L(a) ⊆ L(g).
/// Throws Error(not_unambiguous) unless g's unambiguity is claimed or verified.
struct NfaInUcfgInstance {
  UniversalityInstance instance;
  LabeledMachine lhs;
};
NfaInUcfgInstance build_nfa_in_ucfg_instance(const Automaton& a, const Grammar& g);

}  // namespace ucfg
