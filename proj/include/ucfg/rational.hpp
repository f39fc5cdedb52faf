#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ucfg {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Builds p/q in canonical form.
Rational make_rational(const BigInt& p, const BigInt& q);
Rational make_rational(long p, long q = 1);

/// Parses "p", "-p", "p/q" or a finite decimal such as "0.25". Throws Error on junk.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

/// Decimal expansion truncated towards zero, `digits` places after the point.
std::string to_decimal(const Rational& q, int digits = 20);

double to_double(const Rational& q);

/// Exact dyadic copy of a finite double.
Rational from_double(double x);

/// Outward rounding to multiples of 2^-bits.
Rational round_down(const Rational& q, int bits);
Rational round_up(const Rational& q, int bits);

/// The rational with the smallest denominator in the closed interval [lo, hi].
Rational simplest_between(const Rational& lo, const Rational& hi);

BigInt pow(const BigInt& base, unsigned long exponent);
Rational pow(const Rational& base, unsigned long exponent);

/// floor(sqrt(z)) for z >= 0; `exact` is set when z is a perfect square.
BigInt isqrt(const BigInt& z, bool* exact = nullptr);

/// Number of bits in the denominator.
std::size_t denominator_bits(const Rational& q);

}  // namespace ucfg
