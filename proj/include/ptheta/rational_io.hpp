#pragma once

#include "ptheta/errors.hpp"
#include "ptheta/numeric.hpp"

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

namespace ptheta {

/// Parses "p/q", "-12", "0.108", "1.5e-3" exactly. Decimal input never passes
/// through floating point.
inline rational parse_rational(std::string_view text) {
  auto fail = [&](const char* why) -> rational {
    throw error(errc::parse_error, "invalid rational '" + std::string(text) + "': " + why);
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return fail("empty");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const rational num = parse_rational(text.substr(0, slash));
    const rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) return fail("zero denominator");
    return num / den;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long long frac_digits = 0;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (digits.empty()) return fail("no digits");

  long long exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return fail("unexpected character");
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    if (i == text.size()) return fail("missing exponent");
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return fail("bad exponent");
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 4000) return fail("exponent too large");
    }
    if (exp_negative) exponent = -exponent;
  }

  // A leading zero would select octal parsing.
  const auto nz = digits.find_first_not_of('0');
  const bigint mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  const long long scale = exponent - frac_digits;
  rational value(mantissa);
  const bigint ten_pow = bmp::pow(bigint(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  value = scale < 0 ? value / rational(ten_pow) : value * rational(ten_pow);
  return negative ? rational(-value) : value;
}

/// "p/q" (or "p" for integers).
inline std::string to_fraction_string(const rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Decimal rendering rounded toward zero with the given number of digits
/// after the point.
inline std::string to_decimal_string(const rational& r, unsigned digits = 12) {
  const bool negative = r < 0;
  const rational a = negative ? rational(-r) : r;
  const bigint scale = bmp::pow(bigint(10), digits);
  const bigint scaled = numerator(a) * scale / denominator(a);
  std::string s = scaled.str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  if (digits > 0) s.insert(s.size() - digits, ".");
  return (negative ? "-" : "") + s;
}

}  // namespace ptheta
