#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <complex>
#include <string>
#include <string_view>

namespace jcone {

/// Exact rational scalar (GMP backed, expression templates off so that
/// generic code can treat it like `double`).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Complex = std::complex<double>;

/// Parses "3", "-1/2", "0.25", "1.5e-3" into an exact rational.
/// Decimal strings are read exactly (0.1 == 1/10).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }
inline double to_double(double value) { return value; }

bool is_integer(const Rational& value);

/// Rational with the nearest small denominator (<= max_den) within tol, used to
/// recover lattice points from floating input. Returns false if none exists.
bool snap_to_rational(double value, long max_den, double tol, Rational& out);

// Scalar helpers shared by the templated exact/float code paths.
template <class S>
inline S scalar_from_int(long v) {
  return S(v);
}

template <class S>
inline bool is_zero(const S& v) {
  return v == S(0);
}

inline double abs_value(double v) { return v < 0 ? -v : v; }
inline Rational abs_value(const Rational& v) { return v < 0 ? Rational(-v) : v; }

}  // namespace jcone
