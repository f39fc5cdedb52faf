#include "ucfg/convrec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "ucfg/error.hpp"

namespace ucfg {

ConvPolynomial::ConvPolynomial(std::vector<ConvTerm> terms) {
  std::map<std::vector<int>, Rational> merged;
  for (auto& t : terms) {
    std::sort(t.vars.begin(), t.vars.end());
    merged[t.vars] += t.coeff;
  }
  for (auto& [vars, c] : merged)
    if (c != 0) terms_.push_back({c, vars});
}

ConvPolynomial ConvPolynomial::constant(const Rational& c) { return ConvPolynomial({{c, {}}}); }

ConvPolynomial ConvPolynomial::variable(int i, const Rational& c) { return ConvPolynomial({{c, {i}}}); }

int ConvPolynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.vars.size()));
  return d;
}

int ConvPolynomial::max_variable() const {
  int m = -1;
  for (const auto& t : terms_)
    if (!t.vars.empty()) m = std::max(m, t.vars.back());
  return m;
}

bool ConvPolynomial::nonnegative() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const ConvTerm& t) { return t.coeff >= 0; });
}

ConvPolynomial ConvPolynomial::shifted(int offset) const {
  auto terms = terms_;
  for (auto& t : terms)
    for (int& v : t.vars) v += offset;
  return ConvPolynomial(std::move(terms));
}

ConvPolynomial operator+(const ConvPolynomial& a, const ConvPolynomial& b) {
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return ConvPolynomial(std::move(terms));
}

ConvPolynomial operator-(const ConvPolynomial& a, const ConvPolynomial& b) { return a + Rational(-1) * b; }

ConvPolynomial operator*(const ConvPolynomial& a, const ConvPolynomial& b) {
  std::vector<ConvTerm> terms;
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) {
      ConvTerm t{x.coeff * y.coeff, x.vars};
      t.vars.insert(t.vars.end(), y.vars.begin(), y.vars.end());
      terms.push_back(std::move(t));
    }
  return ConvPolynomial(std::move(terms));
}

ConvPolynomial operator*(const Rational& c, const ConvPolynomial& a) {
  auto terms = a.terms_;
  for (auto& t : terms) t.coeff *= c;
  return ConvPolynomial(std::move(terms));
}

int ConvRecSystem::combined_degree() const {
  int d = 0;
  for (const auto& p : polys) d += p.degree();
  return d;
}

bool ConvRecSystem::monotone() const {
  return std::all_of(initials.begin(), initials.end(), [](const Rational& c) { return c >= 0; }) &&
         std::all_of(polys.begin(), polys.end(), [](const ConvPolynomial& p) { return p.nonnegative(); });
}

void ConvRecSystem::validate() const {
  if (polys.size() != initials.size())
    throw Error(ErrorKind::precondition, "system has " + std::to_string(initials.size()) + " initial values but " +
                                             std::to_string(polys.size()) + " polynomials");
  if (!labels.empty() && labels.size() != initials.size())
    throw Error(ErrorKind::precondition, "label count does not match variable count");
  for (std::size_t i = 0; i < polys.size(); ++i)
    if (polys[i].max_variable() >= k())
      throw Error(ErrorKind::precondition, "polynomial " + std::to_string(i + 1) + " uses f" +
                                               std::to_string(polys[i].max_variable() + 1) + " but k = " +
                                               std::to_string(k()));
}

// ---------------------------------------------------------------------------
// text format

namespace {

class LineLexer {
 public:
  LineLexer(std::string_view s, int line) : s_(s), line_(line) {}

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  int variable() {
    skip();
    if (peek() != 'f') fail("expected a variable f<i>");
    ++pos_;
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a variable index after 'f'");
    int idx = std::stoi(std::string(s_.substr(start, pos_ - start)));
    if (idx < 1) fail("variable indices start at 1");
    return idx - 1;
  }
  Rational number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/' || s_[pos_] == '.'))
      ++pos_;
    if (start == pos_) fail("expected a number");
    try {
      return parse_rational(s_.substr(start, pos_ - start));
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::syntax) const {
    throw ParseError(kind, line_, static_cast<int>(pos_) + 1, msg);
  }
  int column() const { return static_cast<int>(pos_) + 1; }

 private:
  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

ConvPolynomial parse_poly(LineLexer& lex) {
  std::vector<ConvTerm> terms;
  bool first = true;
  while (true) {
    Rational sign = 1;
    if (lex.accept("-"))
      sign = -1;
    else if (!first && !lex.accept("+"))
      break;
    else if (first)
      lex.accept("+");
    first = false;
    ConvTerm t{sign, {}};
    do {
      char c = lex.peek();
      if (c == 'f')
        t.vars.push_back(lex.variable());
      else if (std::isdigit(static_cast<unsigned char>(c)))
        t.coeff *= lex.number();
      else
        lex.fail("expected a number or a variable");
    } while (lex.accept("*"));
    terms.push_back(std::move(t));
    if (lex.at_end()) break;
  }
  if (!lex.at_end()) lex.fail("unexpected trailing input");
  return ConvPolynomial(std::move(terms));
}

std::string monomial_text(const ConvTerm& t, const char* var, bool powers) {
  std::string out;
  auto add = [&](const std::string& f) {
    if (!out.empty()) out += '*';
    out += f;
  };
  if (t.coeff != 1 || t.vars.empty()) add(to_string(t.coeff));
  for (std::size_t i = 0; i < t.vars.size();) {
    std::size_t j = i;
    while (j < t.vars.size() && t.vars[j] == t.vars[i]) ++j;
    std::string name = var + std::to_string(t.vars[i] + 1);
    if (powers && j - i > 1) {
      add(name + "^" + std::to_string(j - i));
    } else {
      for (std::size_t r = i; r < j; ++r) add(name);
    }
    i = j;
  }
  return out;
}

std::string poly_text(const std::vector<ConvTerm>& terms, const char* var, bool powers) {
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& t : terms) {
    ConvTerm abs_t{abs(t.coeff), t.vars};
    if (out.empty())
      out = (t.coeff < 0 ? "-" : "") + monomial_text(abs_t, var, powers);
    else
      out += (t.coeff < 0 ? " - " : " + ") + monomial_text(abs_t, var, powers);
  }
  return out;
}

}  // namespace

ConvRecSystem parse_system(std::string_view text) {
  std::map<int, std::pair<Rational, ConvPolynomial>> rows;
  std::map<int, int> row_line;
  int line_no = 0;
  std::size_t pos = 0;
  int max_ref = -1, max_ref_line = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    LineLexer lex(line, line_no);
    if (lex.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    int idx = lex.variable();
    lex.expect("(");
    lex.expect("0");
    lex.expect(")");
    lex.expect("=");
    bool neg = lex.accept("-");
    Rational init = lex.number();
    if (neg) init = -init;
    lex.expect(";");
    int col = lex.column();
    if (lex.variable() != idx) throw ParseError(ErrorKind::malformed_production, line_no, col, "shift equation names another variable");
    lex.expect("'");
    lex.expect("=");
    ConvPolynomial p = parse_poly(lex);
    if (rows.count(idx))
      throw ParseError(ErrorKind::duplicate_nonterminal, line_no, 1, "f" + std::to_string(idx + 1) + " defined twice");
    if (p.max_variable() > max_ref) {
      max_ref = p.max_variable();
      max_ref_line = line_no;
    }
    rows.emplace(idx, std::make_pair(init, std::move(p)));
    row_line[idx] = line_no;
    if (end == text.size()) break;
  }
  ConvRecSystem s;
  int k = rows.empty() ? 0 : rows.rbegin()->first + 1;
  for (int i = 0; i < k; ++i)
    if (!rows.count(i)) throw ParseError(ErrorKind::undeclared_symbol, line_no, 1, "f" + std::to_string(i + 1) + " has no equation");
  if (max_ref >= k)
    throw ParseError(ErrorKind::undeclared_symbol, max_ref_line, 1, "f" + std::to_string(max_ref + 1) + " is not defined");
  for (auto& [i, row] : rows) {
    s.initials.push_back(row.first);
    s.polys.push_back(row.second);
  }
  return s;
}

std::string print_system(const ConvRecSystem& s) {
  std::ostringstream out;
  for (int i = 0; i < s.k(); ++i) {
    std::string f = "f" + std::to_string(i + 1);
    out << f << "(0)=" << to_string(s.initials[static_cast<std::size_t>(i)]) << "; " << f
        << "' = " << poly_text(s.polys[static_cast<std::size_t>(i)].terms(), "f", false) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

template <typename T>
T convert(const Rational& q);

template <>
Rational convert<Rational>(const Rational& q) {
  return q;
}
template <>
BigInt convert<BigInt>(const Rational& q) {
  if (q.get_den() != 1) throw Error(ErrorKind::precondition, "integer evaluation of a system with coefficient " + to_string(q));
  return q.get_num();
}
template <>
double convert<double>(const Rational& q) {
  return q.get_d();
}
template <>
long double convert<long double>(const Rational& q) {
  return static_cast<long double>(q.get_num().get_d()) / static_cast<long double>(q.get_den().get_d());
}

bool integral(const ConvRecSystem& s) {
  for (const auto& c : s.initials)
    if (c.get_den() != 1) return false;
  for (const auto& p : s.polys)
    for (const auto& t : p.terms())
      if (t.coeff.get_den() != 1) return false;
  return true;
}

}  // namespace

template <typename T>
std::vector<std::vector<T>> eval_prefix_as(const ConvRecSystem& s, int N) {
  s.validate();
  if (N < 0) throw Error(ErrorKind::precondition, "prefix length must be >= 0");
  const int k = s.k();
  const auto len = static_cast<std::size_t>(N) + 1;

  // Monomials share prefixes in a trie; node sequences are partial convolution products.
  struct Node {
    int parent, var;
  };
  std::vector<Node> nodes{{-1, -1}};
  std::map<std::pair<int, int>, int> child;
  std::vector<std::vector<std::pair<T, int>>> uses(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (const auto& t : s.polys[static_cast<std::size_t>(i)].terms()) {
      int node = 0;
      for (int v : t.vars) {
        auto [it, inserted] = child.try_emplace({node, v}, static_cast<int>(nodes.size()));
        if (inserted) nodes.push_back({node, v});
        node = it->second;
      }
      uses[static_cast<std::size_t>(i)].emplace_back(convert<T>(t.coeff), node);
    }

  std::vector<std::vector<T>> f(static_cast<std::size_t>(k), std::vector<T>(len, T(0)));
  std::vector<std::vector<T>> prod(nodes.size(), std::vector<T>(len, T(0)));
  for (int i = 0; i < k; ++i) f[static_cast<std::size_t>(i)][0] = convert<T>(s.initials[static_cast<std::size_t>(i)]);
  prod[0][0] = T(1);

  for (std::size_t n = 0; n + 1 < len; ++n) {
    for (std::size_t x = 1; x < nodes.size(); ++x) {
      const auto& fv = f[static_cast<std::size_t>(nodes[x].var)];
      if (nodes[x].parent == 0) {
        prod[x][n] = fv[n];
        continue;
      }
      const auto& pp = prod[static_cast<std::size_t>(nodes[x].parent)];
      T acc(0);
      for (std::size_t j = 0; j <= n; ++j) acc += pp[j] * fv[n - j];
      prod[x][n] = acc;
    }
    for (int i = 0; i < k; ++i) {
      T acc(0);
      for (const auto& [c, node] : uses[static_cast<std::size_t>(i)]) acc += c * prod[static_cast<std::size_t>(node)][n];
      f[static_cast<std::size_t>(i)][n + 1] = acc;
    }
  }
  return f;
}

template std::vector<std::vector<Rational>> eval_prefix_as<Rational>(const ConvRecSystem&, int);
template std::vector<std::vector<BigInt>> eval_prefix_as<BigInt>(const ConvRecSystem&, int);
template std::vector<std::vector<double>> eval_prefix_as<double>(const ConvRecSystem&, int);
template std::vector<std::vector<long double>> eval_prefix_as<long double>(const ConvRecSystem&, int);

std::vector<std::vector<Rational>> eval_prefix(const ConvRecSystem& s, int N) {
  if (!integral(s)) return eval_prefix_as<Rational>(s, N);
  auto z = eval_prefix_as<BigInt>(s, N);
  std::vector<std::vector<Rational>> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i].assign(z[i].begin(), z[i].end());
  return out;
}

// ---------------------------------------------------------------------------
// constructions

ConvRecSystem ring_op(const ConvRecSystem& a, const ConvRecSystem& b, RingOp op) {
  a.validate();
  b.validate();
  if (a.k() == 0 || b.k() == 0) throw Error(ErrorKind::precondition, "ring_op needs nonempty systems");
  const int off_a = 1, off_b = 1 + a.k();
  ConvRecSystem r;
  r.initials.resize(1);
  r.polys.resize(1);
  r.labels.push_back("r");
  auto label = [](const ConvRecSystem& s, int i, const char* prefix) {
    return std::string(prefix) + (s.labels.empty() ? "f" + std::to_string(i + 1) : s.labels[static_cast<std::size_t>(i)]);
  };
  for (int i = 0; i < a.k(); ++i) {
    r.initials.push_back(a.initials[static_cast<std::size_t>(i)]);
    r.polys.push_back(a.polys[static_cast<std::size_t>(i)].shifted(off_a));
    r.labels.push_back(label(a, i, "a."));
  }
  for (int i = 0; i < b.k(); ++i) {
    r.initials.push_back(b.initials[static_cast<std::size_t>(i)]);
    r.polys.push_back(b.polys[static_cast<std::size_t>(i)].shifted(off_b));
    r.labels.push_back(label(b, i, "b."));
  }
  const Rational& a0 = a.initials[0];
  const Rational& b0 = b.initials[0];
  const ConvPolynomial pa = a.polys[0].shifted(off_a), pb = b.polys[0].shifted(off_b);
  switch (op) {
    case RingOp::add:
      r.initials[0] = a0 + b0;
      r.polys[0] = pa + pb;
      break;
    case RingOp::subtract:
      r.initials[0] = a0 - b0;
      r.polys[0] = pa - pb;
      break;
    case RingOp::convolve:
      // σ(a∗b) = a(0)·σb + σa ∗ b
      r.initials[0] = a0 * b0;
      r.polys[0] = a0 * pb + pa * ConvPolynomial::variable(off_b);
      break;
  }
  return r;
}

ConvRecSystem catalan_system() {
  ConvRecSystem s;
  s.initials = {1};
  s.polys = {ConvPolynomial({{1, {0, 0}}})};
  s.labels = {"C"};
  return s;
}

ConvRecSystem fuss_catalan_system(int degree) {
  if (degree < 1) throw Error(ErrorKind::precondition, "degree must be >= 1");
  ConvRecSystem s;
  s.initials = {1};
  s.polys = {ConvPolynomial({{1, std::vector<int>(static_cast<std::size_t>(degree), 0)}})};
  return s;
}

ConvRecSystem geometric_system(const Rational& ratio) {
  ConvRecSystem s;
  s.initials = {1};
  s.polys = {ConvPolynomial::variable(0, ratio)};
  s.labels = {"u"};
  return s;
}

ConvRecSystem identity_system() {
  ConvRecSystem s;
  s.initials = {1};
  s.polys = {ConvPolynomial()};
  s.labels = {"delta"};
  return s;
}

ConvRecSystem grammar_to_convrec(const Grammar& g) {
  if (!g.is_short_gnf()) throw Error(ErrorKind::not_short_gnf, "grammar_to_convrec needs a short-GNF grammar");
  const int k = g.nonterminal_count();
  const int s0 = g.start();
  auto index = [s0](int x) { return x == s0 ? 0 : (x < s0 ? x + 1 : x); };
  ConvRecSystem s;
  s.initials.assign(static_cast<std::size_t>(k), 0);
  s.labels.resize(static_cast<std::size_t>(k));
  std::vector<std::vector<ConvTerm>> terms(static_cast<std::size_t>(k));
  for (int x = 0; x < k; ++x) s.labels[static_cast<std::size_t>(index(x))] = g.nonterminal_name(x);
  for (const auto& p : g.productions()) {
    auto i = static_cast<std::size_t>(index(p.head));
    if (p.is_epsilon())
      s.initials[i] += 1;
    else
      terms[i].push_back({1, {index(p.body[1].index), index(p.body[2].index)}});
  }
  for (auto& t : terms) s.polys.emplace_back(std::move(t));
  return s;
}

ConvRecSystem universality_difference(const Grammar& g) {
  if (!g.unambiguity().trusted())
    throw Error(ErrorKind::not_unambiguous, "universality_difference needs claimed or verified unambiguity");
  ConvRecSystem f = grammar_to_convrec(g);
  const Rational n = g.alphabet().size();
  ConvRecSystem s;
  s.initials = {1 - f.initials[0], 1};
  s.polys = {ConvPolynomial::variable(1, n) - f.polys[0].shifted(2), ConvPolynomial::variable(1, n)};
  s.labels = {"diff", "all"};
  for (int i = 0; i < f.k(); ++i) {
    s.initials.push_back(f.initials[static_cast<std::size_t>(i)]);
    s.polys.push_back(f.polys[static_cast<std::size_t>(i)].shifted(2));
    s.labels.push_back(f.labels[static_cast<std::size_t>(i)]);
  }
  return s;
}

GfSystem gf_system(const ConvRecSystem& s, const Rational& x) {
  s.validate();
  if (x < 0) throw Error(ErrorKind::precondition, "evaluation point must be >= 0");
  int d = s.combined_degree();
  return {s, x, d == 0 || x * d < 1};
}

std::string format_gf(const GfSystem& g) {
  std::ostringstream out;
  for (int i = 0; i < g.system.k(); ++i) {
    std::vector<ConvTerm> terms;
    if (g.system.initials[static_cast<std::size_t>(i)] != 0) terms.push_back({g.system.initials[static_cast<std::size_t>(i)], {}});
    for (const auto& t : g.system.polys[static_cast<std::size_t>(i)].terms()) {
      Rational c = g.x * t.coeff;
      if (c != 0) terms.push_back({c, t.vars});
    }
    out << "y" << i + 1 << " = " << poly_text(terms, "y", true) << "\n";
  }
  return out.str();
}

RatioBound ratio_bound(const ConvRecSystem& s) {
  int d = s.combined_degree();
  return {d, d * std::numbers::e};
}

}  // namespace ucfg
