#include "dsscap/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace dsscap {

namespace {

BigInt pow10(int e) {
  BigInt p = 1;
  for (int i = 0; i < e; ++i) p *= 10;
  return p;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> void {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  auto read_digits = [&]() -> BigInt {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail();
    BigInt v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      ++pos;
    }
    return v;
  };
  const BigInt numerator = read_digits();
  BigInt denominator = 1;
  if (pos < text.size()) {
    if (text[pos] != '/') fail();
    ++pos;
    denominator = read_digits();
    if (pos != text.size()) fail();
    if (denominator == 0)
      throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  }
  Rational r(numerator, denominator);
  if (negative) r = -r;
  return r;
}

std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string format_decimal(const Rational& r, int significant_digits) {
  if (significant_digits < 1)
    throw std::invalid_argument("significant_digits must be >= 1");
  if (r == 0) return "0";

  const bool negative = r < 0;
  const BigInt num = boost::multiprecision::abs(boost::multiprecision::numerator(r));
  const BigInt den = boost::multiprecision::denominator(r);

  // Decimal exponent e with 10^e <= num/den < 10^(e+1). The digit-count
  // estimate is off by at most one, fixed up by exact comparison.
  long e = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
  auto at_least_pow = [&](long ex) {
    // num/den >= 10^ex ?
    if (ex >= 0) return num >= den * pow10(static_cast<int>(ex));
    return num * pow10(static_cast<int>(-ex)) >= den;
  };
  while (!at_least_pow(e)) --e;
  while (at_least_pow(e + 1)) ++e;

  // digits = round(num/den * 10^(sd-1-e)), half-to-even.
  const long shift = significant_digits - 1 - e;
  BigInt scaled_num = num;
  BigInt scaled_den = den;
  if (shift >= 0)
    scaled_num *= pow10(static_cast<int>(shift));
  else
    scaled_den *= pow10(static_cast<int>(-shift));
  BigInt digits = scaled_num / scaled_den;
  const BigInt rem = scaled_num % scaled_den;
  const BigInt twice_rem = rem * 2;
  const int cmp = twice_rem.compare(scaled_den);
  if (cmp > 0 || (cmp == 0 && (digits & 1) == 1)) ++digits;
  if (digits == pow10(significant_digits)) {
    digits = pow10(significant_digits - 1);
    ++e;
  }

  std::string s = digits.str();
  std::string out;
  if (e < -5 || e >= 15) {
    out = s.substr(0, 1);
    if (s.size() > 1) out += "." + s.substr(1);
    out += "e" + std::to_string(e);
  } else if (e < 0) {
    out = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + s;
  } else if (e + 1 >= static_cast<long>(s.size())) {
    out = s + std::string(static_cast<std::size_t>(e + 1) - s.size(), '0');
  } else {
    out = s.substr(0, static_cast<std::size_t>(e + 1)) + "." +
          s.substr(static_cast<std::size_t>(e + 1));
  }
  return negative ? "-" + out : out;
}

}  // namespace dsscap
