#include "jcone/gamma.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace jcone {

namespace {

constexpr double kG = 7.0;
constexpr double kCoeff[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

using C = std::complex<double>;

// Lanczos series for Re z >= 1/2, written for Gamma(z) = Gamma((z-1)+1).
C lanczos_sum(C zm1) {
  C x = kCoeff[0];
  for (int i = 1; i < 9; ++i) x += kCoeff[i] / (zm1 + static_cast<double>(i));
  return x;
}

[[noreturn]] void pole(C z) {
  throw PoleError("Gamma has a pole at z = " + std::to_string(z.real()), 1);
}

}  // namespace

bool is_classical_pole(C z, double tol) {
  if (std::abs(z.imag()) > tol) return false;
  double r = z.real();
  if (r > tol) return false;
  return std::abs(r - std::nearbyint(r)) <= tol;
}

C gamma_classical(C z) {
  if (is_classical_pole(z)) pole(z);
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_classical(1.0 - z));
  C zm1 = z - 1.0;
  C t = zm1 + kG + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, zm1 + 0.5) * std::exp(-t) * lanczos_sum(zm1);
}

double gamma_classical(double x) { return gamma_classical(C(x, 0.0)).real(); }

C lgamma_classical(C z) {
  if (is_classical_pole(z)) pole(z);
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_classical(1.0 - z);
  C zm1 = z - 1.0;
  C t = zm1 + kG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (zm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(zm1));
}

}  // namespace jcone
