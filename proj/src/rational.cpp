#include "jcone/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace jcone {

namespace {

Integer pow10(long e) {
  Integer r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

[[noreturn]] void bad(std::string_view text) {
  throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  Integer mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad(text);
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') bad(text);
    ++pos;
    std::string rest(text.substr(pos));
    if (rest.empty()) bad(text);
    std::size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception&) {
      bad(text);
    }
    if (used != rest.size()) bad(text);
  }
  exponent -= frac_digits;
  Rational value(mantissa);
  if (exponent > 0) value *= Rational(pow10(exponent));
  if (exponent < 0) value /= Rational(pow10(-exponent));
  return negative ? Rational(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (text.empty()) bad(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(trim(text.substr(0, slash)));
  Rational den = parse_decimal(trim(text.substr(slash + 1)));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& value) { return value.str(); }

bool is_integer(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

bool snap_to_rational(double value, long max_den, double tol, Rational& out) {
  if (!std::isfinite(value)) return false;
  for (long den = 1; den <= max_den; ++den) {
    double scaled = value * static_cast<double>(den);
    double nearest = std::nearbyint(scaled);
    if (std::abs(scaled - nearest) <= tol * static_cast<double>(den)) {
      out = Rational(static_cast<long long>(nearest)) / den;
      return true;
    }
  }
  return false;
}

}  // namespace jcone
