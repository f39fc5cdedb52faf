#include "ucfg/rational.hpp"

#include <cmath>

#include "ucfg/error.hpp"

namespace ucfg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::undeclared_symbol: return "undeclared-symbol";
    case ErrorKind::duplicate_nonterminal: return "duplicate-nonterminal";
    case ErrorKind::malformed_production: return "malformed-production";
    case ErrorKind::invalid_word: return "invalid-word";
    case ErrorKind::alphabet_mismatch: return "alphabet-mismatch";
    case ErrorKind::not_deterministic: return "not-deterministic";
    case ErrorKind::not_short_gnf: return "not-short-gnf";
    case ErrorKind::not_unambiguous: return "not-unambiguous";
    case ErrorKind::cyclic_unit_chain: return "cyclic-unit-chain";
    case ErrorKind::precondition: return "precondition-violation";
    case ErrorKind::nonmonotone: return "nonmonotone-system";
    case ErrorKind::backend: return "backend";
  }
  return "unknown";
}

Rational make_rational(const BigInt& p, const BigInt& q) {
  if (q == 0) throw Error(ErrorKind::precondition, "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational make_rational(long p, long q) { return make_rational(BigInt(p), BigInt(q)); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw Error(ErrorKind::syntax, "malformed rational '" + std::string(text) + "'");
    out = make_rational(BigInt(std::string(num)), BigInt(std::string(den)));
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty()))
      throw Error(ErrorKind::syntax, "malformed decimal '" + std::string(text) + "'");
    BigInt num(std::string(whole.empty() ? "0" : whole) + std::string(frac));
    out = make_rational(num, pow(BigInt(10), frac.size()));
  } else {
    if (!all_digits(s))
      throw Error(ErrorKind::syntax, "malformed number '" + std::string(text) + "'");
    out = Rational(BigInt(std::string(s)));
  }
  return negative ? Rational(-out) : out;
}

std::string to_string(const BigInt& z) { return z.get_str(); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q, int digits) {
  BigInt num = abs(q.get_num());
  const BigInt& den = q.get_den();
  BigInt whole = num / den;
  BigInt rem = num % den;
  std::string out = (q < 0 ? "-" : "") + whole.get_str();
  if (digits > 0) {
    out += '.';
    for (int i = 0; i < digits; ++i) {
      rem *= 10;
      BigInt digit = rem / den;
      rem %= den;
      out += static_cast<char>('0' + digit.get_si());
    }
  }
  return out;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::precondition, "non-finite double");
  Rational r(x);  // exact: doubles are dyadic
  return r;
}

Rational round_down(const Rational& q, int bits) {
  if (q.get_den() == 1) return q;
  BigInt scale = BigInt(1) << bits;
  BigInt scaled = q.get_num() * scale;
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
  Rational r = make_rational(f, scale);
  return r;
}

Rational round_up(const Rational& q, int bits) {
  if (q.get_den() == 1) return q;
  BigInt scale = BigInt(1) << bits;
  BigInt scaled = q.get_num() * scale;
  BigInt c;
  mpz_cdiv_q(c.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
  return make_rational(c, scale);
}

namespace {

// Stern-Brocot descent for 0 <= lo <= hi.
Rational simplest_nonneg(Rational lo, Rational hi) {
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  // lo and hi share the integer part fl; recurse on reciprocals of fractional parts
  Rational lo_frac = lo - fl, hi_frac = hi - fl;
  Rational inner = simplest_nonneg(Rational(1) / hi_frac, Rational(1) / lo_frac);
  Rational r = Rational(fl) + Rational(1) / inner;
  r.canonicalize();
  return r;
}

}  // namespace

Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw Error(ErrorKind::precondition, "empty interval");
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return -simplest_nonneg(-hi, -lo);
  return simplest_nonneg(lo, hi);
}

BigInt pow(const BigInt& base, unsigned long exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

Rational pow(const Rational& base, unsigned long exponent) {
  return make_rational(pow(base.get_num(), exponent), pow(base.get_den(), exponent));
}

BigInt isqrt(const BigInt& z, bool* exact) {
  if (z < 0) throw Error(ErrorKind::precondition, "square root of a negative integer");
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
  if (exact) *exact = (r * r == z);
  return r;
}

std::size_t denominator_bits(const Rational& q) {
  return mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
}

}  // namespace ucfg
