#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ucfg/automaton.hpp"

namespace ucfg {

/// Regular expression tree. Nodes are immutable and shared.
class Regex {
 public:
  enum class Kind { empty, epsilon, letter, alt, concat, star };

  static Regex none();
  static Regex eps();
  static Regex sym(Letter a);
  static Regex alt(Regex a, Regex b);
  static Regex cat(Regex a, Regex b);
  static Regex star(Regex a);
  /// Union / concatenation of a list; empty lists give none() / eps().
  static Regex alt_all(const std::vector<Regex>& xs);
  static Regex cat_all(const std::vector<Regex>& xs);
  /// e^k
  static Regex power(const Regex& e, int k);

  Kind kind() const { return node_->kind; }
  Letter letter() const { return node_->letter; }
  const Regex& left() const { return node_->kids[0]; }
  const Regex& right() const { return node_->kids[1]; }

  /// Flag carried for the caller: every accepted word has a single parse.
  bool unambiguous() const { return unambiguous_; }
  Regex with_unambiguous(bool flag) const;

  std::string to_string(const Alphabet& sigma) const;
  int size() const;

 private:
  struct Node {
    Kind kind;
    Letter letter = 0;
    std::vector<Regex> kids;
  };
  explicit Regex(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  bool unambiguous_ = false;
};

/// Glushkov (position) automaton: eps-free, one state per letter occurrence plus
/// an initial state. When no subexpression parses eps in two ways, accepting runs
/// correspond one-to-one to parses in which every star iteration is nonempty.
/// Flagged-unambiguous input is classified (DFA/UFA) by the exact check.
Automaton regex_to_nfa(const Regex& e, const Alphabet& sigma);

/// Number of parses of w under the nonempty-iteration convention for stars.
BigInt count_parses(const Regex& e, const Word& w);

}  // namespace ucfg
