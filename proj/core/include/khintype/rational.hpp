#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace khintype {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "7", "-3/4", "0.125" or "1.5e-3" into an exact rational (decimals are exact).
Rational parse_rational(std::string_view text);

/// Comma-separated list of parse_rational() values.
std::vector<Rational> parse_rational_list(std::string_view text);

/// Best rational approximation with denominator <= max_den (continued fractions).
Rational rationalize(double x, long max_den = 1'000'000);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);

inline double to_double(const Rational& x) { return x.get_d(); }
std::string to_string(const Rational& x);

}  // namespace khintype
