#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ucfg {

/// Letter index into an Alphabet (0-based).
using Letter = int;
using Word = std::vector<Letter>;

/// Ordered set of distinct letter names; index i is letter a_{i+1}.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> letters);

  /// Alphabet {a_1, ..., a_n} with letter names "a1".."an".
  static Alphabet indexed(int n);
  /// Alphabet of one-character letters, e.g. from_chars("ab").
  static Alphabet from_chars(std::string_view chars);

  int size() const { return static_cast<int>(letters_.size()); }
  const std::string& name(Letter a) const { return letters_.at(static_cast<std::size_t>(a)); }
  const std::vector<std::string>& letters() const { return letters_; }
  std::optional<Letter> find(std::string_view name) const;
  bool contains(Letter a) const { return a >= 0 && a < size(); }

  /// Whether every letter name is a single character (words then print without spaces).
  bool compact() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> letters_;
};

/// Words print as concatenated letters for one-character alphabets, space separated
/// otherwise; the empty word prints as "eps".
std::string format_word(const Alphabet& sigma, const Word& w);
/// Inverse of format_word. Throws Error(invalid_word) on unknown letters.
Word parse_word(const Alphabet& sigma, std::string_view text);

/// Throws Error(invalid_word) when w uses a letter outside sigma.
void validate_word(const Alphabet& sigma, const Word& w);

/// Calls fn(w) for every word of length exactly n, in lexicographic order.
template <typename Fn>
void for_each_word(int alphabet_size, int n, Fn&& fn) {
  Word w(static_cast<std::size_t>(n), 0);
  if (alphabet_size == 0) {
    if (n == 0) fn(w);
    return;
  }
  while (true) {
    fn(w);
    int i = n - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == alphabet_size - 1) {
      w[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) return;
    ++w[static_cast<std::size_t>(i)];
  }
}

}  // namespace ucfg
