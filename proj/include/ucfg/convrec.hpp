#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ucfg/grammar.hpp"
#include "ucfg/rational.hpp"

namespace ucfg {

/// coeff * (f_{v1} ∗ f_{v2} ∗ ...); vars sorted, empty for a constant.
struct ConvTerm {
  Rational coeff;
  std::vector<int> vars;

  friend bool operator==(const ConvTerm&, const ConvTerm&) = default;
};

/// Polynomial under convolution. A constant c stands for the sequence c,0,0,...
class ConvPolynomial {
 public:
  ConvPolynomial() = default;
  /// Sorts variables, merges equal monomials and drops zero coefficients.
  explicit ConvPolynomial(std::vector<ConvTerm> terms);

  static ConvPolynomial constant(const Rational& c);
  static ConvPolynomial variable(int i, const Rational& c = 1);

  const std::vector<ConvTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  int max_variable() const;  // -1 when no variable occurs
  bool nonnegative() const;

  /// Renames variable i to i + offset.
  ConvPolynomial shifted(int offset) const;

  friend ConvPolynomial operator+(const ConvPolynomial& a, const ConvPolynomial& b);
  friend ConvPolynomial operator-(const ConvPolynomial& a, const ConvPolynomial& b);
  friend ConvPolynomial operator*(const ConvPolynomial& a, const ConvPolynomial& b);
  friend ConvPolynomial operator*(const Rational& c, const ConvPolynomial& a);
  friend bool operator==(const ConvPolynomial&, const ConvPolynomial&) = default;

 private:
  std::vector<ConvTerm> terms_;
};

/// σ f_i = p_i(f_1, ..., f_k) with initial values f_i(0). Variable 0 is distinguished.
struct ConvRecSystem {
  std::vector<Rational> initials;
  std::vector<ConvPolynomial> polys;
  std::vector<std::string> labels;  // optional, for diagnostics

  int k() const { return static_cast<int>(initials.size()); }
  int combined_degree() const;
  bool monotone() const;
  /// Throws Error(precondition) on size mismatch or out-of-range variables.
  void validate() const;
};

/// Text format, one line per variable:  f1(0)=1; f1' = 2*f1*f2 + 3
ConvRecSystem parse_system(std::string_view text);
std::string print_system(const ConvRecSystem& s);

/// table[i][n] = f_i(n) for n = 0..N.
template <typename T>
std::vector<std::vector<T>> eval_prefix_as(const ConvRecSystem& s, int N);

/// Exact; integer systems run on integers.
std::vector<std::vector<Rational>> eval_prefix(const ConvRecSystem& s, int N);

enum class RingOp { add, subtract, convolve };
/// Result variable 0 is op(a_0, b_0); then a's variables, then b's.
ConvRecSystem ring_op(const ConvRecSystem& a, const ConvRecSystem& b, RingOp op);

/// Catalan, 2^n-style geometric and similar building blocks.
ConvRecSystem catalan_system();
ConvRecSystem fuss_catalan_system(int degree);
ConvRecSystem geometric_system(const Rational& ratio);
ConvRecSystem identity_system();

/// One variable per nonterminal, start first: f_X(0) = #(X <- eps),
/// p_X = sum over X <- aYZ of f_Y ∗ f_Z. Throws Error(not_short_gnf).
ConvRecSystem grammar_to_convrec(const Grammar& g);

/// |Σ|^n - f_S(n). Throws Error(not_unambiguous) unless the status is trusted.
ConvRecSystem universality_difference(const Grammar& g);

/// y_i = f_i(0) + x p̂_i(y).
struct GfSystem {
  ConvRecSystem system;
  Rational x;
  bool in_uniqueness_zone = true;  // x < 1/d (always when d = 0)
};
GfSystem gf_system(const ConvRecSystem& s, const Rational& x);
/// "y1 = 1 + 1/4*y1^2", one equation per line.
std::string format_gf(const GfSystem& g);

struct RatioBound {
  int d = 0;
  double bound = 0;  // d * e
};
RatioBound ratio_bound(const ConvRecSystem& s);

}  // namespace ucfg
