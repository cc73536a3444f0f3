#pragma once

#include <complex>
#include <stdexcept>

namespace jcone {

/// Raised when a gamma factor is evaluated at a pole. `factor` is the 1-based
/// index j of the offending factor Gamma(z - d/2 (j-1)) (1 for the classical case).
class PoleError : public std::domain_error {
 public:
  PoleError(const std::string& what, int factor) : std::domain_error(what), factor_(factor) {}
  int factor() const { return factor_; }

 private:
  int factor_;
};

/// Nonpositive integers, to within `tol` on the real axis.
bool is_classical_pole(std::complex<double> z, double tol = 1e-12);

/// Classical Gamma by the Lanczos approximation (g = 7, 9 terms), reflection for Re z < 1/2.
std::complex<double> gamma_classical(std::complex<double> z);
double gamma_classical(double x);

/// A branch of log Gamma(z): the real part is log|Gamma(z)|, the imaginary
/// part is continuous on Re z >= 1/2.
std::complex<double> lgamma_classical(std::complex<double> z);

}  // namespace jcone
