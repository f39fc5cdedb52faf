#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucfg/alphabet.hpp"
#include "ucfg/rational.hpp"

namespace ucfg {

enum class AutomatonClass { DFA, UFA, NFA };
const char* to_string(AutomatonClass c);

struct Transition {
  int from = 0;
  Letter letter = 0;
  int to = 0;
  int id = 0;  // position in transitions(); parallel edges keep distinct ids

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Finite automaton without eps-moves. Transition ids are their indices.
/// The class tag is DFA when the shape is deterministic, NFA otherwise;
/// mark_unambiguous() upgrades NFA to UFA after an exact check.
class Automaton {
 public:
  Automaton() = default;
  Automaton(Alphabet alphabet, std::vector<std::string> states, std::vector<int> initial,
            std::vector<int> accepting, std::vector<Transition> transitions);

  const Alphabet& alphabet() const { return alphabet_; }
  int state_count() const { return static_cast<int>(states_.size()); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& state_name(int q) const { return states_.at(static_cast<std::size_t>(q)); }
  std::optional<int> find_state(std::string_view name) const;
  const std::vector<int>& initial() const { return initial_; }
  const std::vector<int>& accepting() const { return accepting_; }
  bool is_initial(int q) const { return initial_mask_[static_cast<std::size_t>(q)]; }
  bool is_accepting(int q) const { return accepting_mask_[static_cast<std::size_t>(q)]; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  /// Transition ids leaving q, in id order.
  const std::vector<int>& out(int q) const { return out_[static_cast<std::size_t>(q)]; }

  AutomatonClass automaton_class() const { return class_; }
  bool is_deterministic() const { return class_ == AutomatonClass::DFA; }
  bool total() const { return total_; }

  /// Caller asserts unambiguity (normally after check_unambiguous_nfa).
  Automaton mark_unambiguous() const;

  friend bool operator==(const Automaton&, const Automaton&) = default;

 private:
  Alphabet alphabet_;
  std::vector<std::string> states_;
  std::vector<int> initial_, accepting_;
  std::vector<bool> initial_mask_, accepting_mask_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<int>> out_;
  AutomatonClass class_ = AutomatonClass::NFA;
  bool total_ = false;
};

/// Text format:
///
///     alphabet: a b
///     states: p q
///     initial: p
///     accepting: q
///     p a q
///     q b p
Automaton parse_automaton(std::string_view text);
std::string print_automaton(const Automaton& a);

bool accepts(const Automaton& a, const Word& w);
/// Number of accepting runs on w.
BigInt count_runs(const Automaton& a, const Word& w);
/// Accepting runs by length, n = 0..N (equals accepted-word counts for UFAs).
std::vector<BigInt> path_counts(const Automaton& a, int N);

/// Removes states not on some initial-to-accepting path.
Automaton trim(const Automaton& a);

struct NfaUnambiguity {
  bool unambiguous = true;
  std::optional<Word> witness;  // shortest word with two accepting runs
};
/// Exact decision via the self-product on the trimmed automaton.
NfaUnambiguity check_unambiguous_nfa(const Automaton& a);
/// Reclassifies: DFA stays DFA, unambiguous NFAs become UFA.
Automaton classify(const Automaton& a);

/// Adds a rejecting sink so every (state, letter) has a successor. Identity on total input.
Automaton totalise(const Automaton& a);
/// Complement of a DFA as a total DFA. Throws Error(not_deterministic).
Automaton dfa_complement(const Automaton& a);
/// Subset construction restricted to reachable subsets; result is a total DFA.
Automaton determinise(const Automaton& a);

/// Synchronous product recognising L(a) ∩ L(b).
Automaton intersect(const Automaton& a, const Automaton& b);

/// Shortest accepted word (lexicographically first among shortest).
std::optional<Word> shortest_accepted(const Automaton& a);

/// Shortest word in L(a) \ L(b), found by BFS over (state of a, subset of b).
/// Throws Error(alphabet_mismatch).
std::optional<Word> inclusion_counterexample(const Automaton& a, const Automaton& b);
bool subset_oracle_inclusion(const Automaton& a, const Automaton& b);

Automaton universal_automaton(const Alphabet& sigma);
Automaton empty_automaton(const Alphabet& sigma);

}  // namespace ucfg
