#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tvx {

using Rational = mpq_class;

/// Parses "p", "p/q", or a plain decimal "d.ddd" (optionally signed) into an
/// exact rational. Throws ParseError(MalformedNumber) on anything else.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise, always in lowest terms.
std::string to_string(const Rational& value);

/// num/den in lowest terms; den must be nonzero.
Rational ratio(long num, long den);

double to_double(const Rational& value);

/// Exact conversion of a finite double into a rational.
Rational from_double(double value);

}  // namespace tvx
