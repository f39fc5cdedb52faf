#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ucfg/grammar.hpp"
#include "ucfg/rational.hpp"

namespace ucfg {

struct DerivationCount {
  Word word;
  BigInt count;
  bool infinite = false;  // unit or eps cycles give infinitely many trees
};

/// Exact number of derivation trees of w from the start symbol.
/// Throws Error(invalid_word) if w uses letters outside the alphabet.
DerivationCount count_derivations(const Grammar& g, const Word& w);

bool accepts(const Grammar& g, const Word& w);

/// Membership test that prepares the grammar once for repeated queries.
class Recognizer {
 public:
  explicit Recognizer(const Grammar& g);
  ~Recognizer();
  Recognizer(const Recognizer&) = delete;
  Recognizer& operator=(const Recognizer&) = delete;
  bool operator()(const Word& w);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Number of eps-derivation trees per nonterminal; nullopt means infinitely many.
std::vector<std::optional<BigInt>> epsilon_tree_counts(const Grammar& g);

struct UnambiguityCheck {
  bool ok = true;
  int bound = 0;
  std::optional<DerivationCount> counterexample;  // shortest, then lexicographically first
};

/// Checks that every word of length <= bound has at most one derivation tree.
UnambiguityCheck check_unambiguous_bounded(const Grammar& g, int bound);

/// |L(g) ∩ Σ^n| for n = 0..bound by exhaustive membership.
std::vector<BigInt> bounded_word_counts(const Grammar& g, int bound);

/// Visits every word of length <= bound in depth-first lexicographic order with
/// its derivation count saturated at 2^64-1 (infinite counts saturate too).
/// Returning false from the visitor skips the extensions of that word.
void for_each_word_with_count(const Grammar& g, int bound,
                              const std::function<bool(const Word&, std::uint64_t)>& visit);

/// Derivation trees by yield length for a short-GNF grammar, n = 0..N:
/// T_X(0) = #(X <- eps), T_X(n+1) = sum over X <- aYZ of sum_{i+j=n} T_Y(i) T_Z(j).
/// For unambiguous grammars this is |L(g) ∩ Σ^n|. Throws Error(not_short_gnf).
std::vector<BigInt> short_gnf_length_counts(const Grammar& g, int N);

}  // namespace ucfg
