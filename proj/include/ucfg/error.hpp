#pragma once

#include <stdexcept>
#include <string>

namespace ucfg {

enum class ErrorKind {
  syntax,
  undeclared_symbol,
  duplicate_nonterminal,
  malformed_production,
  invalid_word,
  alphabet_mismatch,
  not_deterministic,
  not_short_gnf,
  not_unambiguous,
  cyclic_unit_chain,
  precondition,
  nonmonotone,
  backend,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error in one of the text formats, with a 1-based position.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int column, const std::string& message)
      : Error(kind, "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace ucfg
