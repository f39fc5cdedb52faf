#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucfg/alphabet.hpp"

namespace ucfg {

struct Symbol {
  bool terminal = false;
  int index = 0;

  static Symbol t(Letter a) { return {true, a}; }
  static Symbol nt(int x) { return {false, x}; }

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Production {
  int head = 0;
  std::vector<Symbol> body;

  bool is_epsilon() const { return body.empty(); }
  friend bool operator==(const Production&, const Production&) = default;
};

struct UnambiguityStatus {
  enum class Kind { unknown, claimed, bounded_verified };
  Kind kind = Kind::unknown;
  int bound = 0;  // meaningful for bounded_verified

  static UnambiguityStatus claimed() { return {Kind::claimed, 0}; }
  static UnambiguityStatus verified(int n) { return {Kind::bounded_verified, n}; }
  bool trusted() const { return kind != Kind::unknown; }

  friend bool operator==(const UnambiguityStatus&, const UnambiguityStatus&) = default;
};

/// Context-free grammar <Sigma, N, S, <-> over an indexed alphabet.
///
/// Productions are kept grouped by head in nonterminal order (stable), so the
/// printed form and the in-memory form agree. Duplicate productions are kept:
/// they are distinct derivation steps and matter for derivation counting.
class Grammar {
 public:
  Grammar() = default;
  Grammar(Alphabet alphabet, std::vector<std::string> nonterminals, int start,
          std::vector<Production> productions, UnambiguityStatus status = {});

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  int nonterminal_count() const { return static_cast<int>(nonterminals_.size()); }
  const std::string& nonterminal_name(int x) const { return nonterminals_.at(static_cast<std::size_t>(x)); }
  std::optional<int> find_nonterminal(std::string_view name) const;
  int start() const { return start_; }
  const std::vector<Production>& productions() const { return productions_; }
  const UnambiguityStatus& unambiguity() const { return status_; }

  /// Every production is X <- eps or X <- a Y Z.
  bool is_short_gnf() const;
  /// Indices into productions() with the given head.
  std::vector<int> productions_of(int head) const;

  Grammar with_status(UnambiguityStatus status) const;

  friend bool operator==(const Grammar&, const Grammar&) = default;

 private:
  Alphabet alphabet_;
  std::vector<std::string> nonterminals_;
  int start_ = 0;
  std::vector<Production> productions_;
  UnambiguityStatus status_;
};

/// Reads the grammar text format:
///
///     alphabet: a b
///     start: S
///     unambiguity: claimed        (optional; or "verified N")
///     S -> eps | a S b S
///
/// Nonterminals are the production heads in order of appearance. Lines starting
/// with '#' are comments.
Grammar parse_grammar(std::string_view text);
std::string print_grammar(const Grammar& g);

/// Picks a name not yet used by a terminal or nonterminal of g.
std::string fresh_name(const Grammar& g, const std::string& base);

struct TrimResult {
  Grammar grammar;
  std::vector<std::string> removed;  // unproductive or unreachable nonterminals
};

/// Removes unproductive and unreachable nonterminals. An empty-language grammar
/// keeps its start symbol with no productions.
TrimResult trim(const Grammar& g);

/// Nonterminals deriving eps.
std::vector<bool> nullable_set(const Grammar& g);
/// Nonterminals deriving at least one terminal word.
std::vector<bool> productive_set(const Grammar& g);

struct ShortGnfResult {
  Grammar grammar;
  std::vector<std::string> removed;  // reported by the initial trim
};

/// Converts a proper CFG into short Greibach normal form (X <- eps | a Y Z).
///
/// Pipeline: trim, eps-removal, unit-removal, Chomsky binarisation, then the
/// left-corner transform of the binary grammar, whose productions already have
/// the shapes a <A/B> E and c <C/D> <A/B>; E <- eps pads short bodies. Every step
/// maps derivation trees bijectively for words other than eps, so derivation
/// counts (and therefore unambiguity) are preserved. Input grammars already in
/// short GNF are only trimmed.
///
/// Throws Error(cyclic_unit_chain) when unit or eps cycles make some word have
/// infinitely many derivations.
ShortGnfResult to_short_gnf(const Grammar& g);

/// Reorders nonterminals so that the start symbol has index 0.
Grammar start_first(const Grammar& g);

}  // namespace ucfg
