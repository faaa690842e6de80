#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace pbe {

/// Arbitrary-precision rational. GMP keeps it canonical (reduced, positive
/// denominator, zero as 0/1) after every arithmetic operation.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// Parses "3", "-2/7", "0.125", "1e-3" exactly.
Rational parse_rational(std::string_view text);

/// Finite decimal when the denominator is 2^a 5^b, otherwise "p/q".
std::string format_rational(const Rational& q);

Rational factorial(unsigned n);

Rational pow(const Rational& base, unsigned exponent);

double to_double(const Rational& q);

}  // namespace pbe
