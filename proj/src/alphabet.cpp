#include "ucfg/alphabet.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ucfg/error.hpp"

namespace ucfg {

Alphabet::Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
  std::set<std::string> seen;
  for (const auto& l : letters_) {
    if (l.empty()) throw Error(ErrorKind::syntax, "empty letter name");
    if (!seen.insert(l).second) throw Error(ErrorKind::syntax, "duplicate letter '" + l + "'");
  }
}

Alphabet Alphabet::indexed(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("a" + std::to_string(i));
  return Alphabet(std::move(names));
}

Alphabet Alphabet::from_chars(std::string_view chars) {
  std::vector<std::string> names;
  for (char c : chars) names.emplace_back(1, c);
  return Alphabet(std::move(names));
}

std::optional<Letter> Alphabet::find(std::string_view name) const {
  auto it = std::find(letters_.begin(), letters_.end(), name);
  if (it == letters_.end()) return std::nullopt;
  return static_cast<Letter>(it - letters_.begin());
}

bool Alphabet::compact() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](const std::string& l) { return l.size() == 1; });
}

std::string format_word(const Alphabet& sigma, const Word& w) {
  if (w.empty()) return "eps";
  std::string out;
  const bool compact = sigma.compact();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += sigma.name(w[i]);
  }
  return out;
}

Word parse_word(const Alphabet& sigma, std::string_view text) {
  Word w;
  if (text == "eps" || text.empty()) return w;
  auto lookup = [&](std::string_view tok) {
    auto a = sigma.find(tok);
    if (!a) throw Error(ErrorKind::invalid_word, "letter '" + std::string(tok) + "' not in alphabet");
    w.push_back(*a);
  };
  if (text.find(' ') == std::string_view::npos && sigma.compact()) {
    for (char c : text) lookup(std::string_view(&c, 1));
  } else {
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) lookup(tok);
  }
  return w;
}

void validate_word(const Alphabet& sigma, const Word& w) {
  for (Letter a : w)
    if (!sigma.contains(a))
      throw Error(ErrorKind::invalid_word, "letter index " + std::to_string(a) + " not in alphabet");
}

}  // namespace ucfg
