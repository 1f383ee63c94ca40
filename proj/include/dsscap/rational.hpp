#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace dsscap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p" or "p/q". The denominator must be a positive integer;
/// anything else (whitespace, decimals, empty input) throws
/// std::invalid_argument. The result is normalized to lowest terms.
Rational parse_rational(std::string_view text);

/// Lowest-terms rendering: "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rational& r);

/// Plain decimal rendering with the given number of significant digits,
/// rounded half-to-even. Values far outside [1e-5, 1e15) fall back to
/// scientific notation so the digit count stays fixed.
std::string format_decimal(const Rational& r, int significant_digits = 12);

}  // namespace dsscap
