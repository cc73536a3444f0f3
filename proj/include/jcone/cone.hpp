#pragma once

#include "jcone/gamma.hpp"
#include "jcone/partition.hpp"
#include "jcone/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jcone {

enum class Field { Real, Complex };

Field parse_field(const std::string& tag);  // "R" or "C"
const char* field_tag(Field f);

/// Hermitian q x q matrices over R (d = 1) or C (d = 2).
struct ConeStructure {
  Field field = Field::Real;
  int q = 1;
  int d = 1;
  int n = 1;
  Rational mu0;    // d (q - 1) / 2
  Rational alpha;  // 2 / d

  static ConeStructure make(Field field, int q);

  Rational half_d() const { return Rational(d) / 2; }
  double mu0_value() const { return to_double(mu0); }
  double alpha_value() const { return to_double(alpha); }
};

/// Beta parameters with extension level k: nu must lie in E_k = {Re nu > mu0 - k}.
struct BetaParams {
  Complex mu;
  Complex nu;
  int k = 0;

  static BetaParams make(Complex mu, Complex nu, int k, const ConeStructure& cone);
};

/// Exact counterpart used by the moment engine.
struct ExactBetaParams {
  Rational mu;
  Rational nu;
  int k = 0;

  static ExactBetaParams make(Rational mu, Rational nu, int k, const ConeStructure& cone);
  BetaParams to_complex() const;
};

/// Smallest k >= 0 with nu > mu0 - k.
int minimal_extension_level(const Rational& nu, const ConeStructure& cone);

/// Hypothesis mu > mu0 + k q + 3/2 of the positivity dichotomy.
bool positivity_hypothesis_holds(const Rational& mu, int k, const ConeStructure& cone);

Complex gamma_cone(Complex z, const ConeStructure& cone);
Complex lgamma_cone(Complex z, const ConeStructure& cone);
Complex beta_cone(Complex z, Complex w, const ConeStructure& cone);

/// True if some factor Gamma(z - d/2 (j-1)) has a pole.
bool is_cone_pole(Complex z, const ConeStructure& cone, double tol = 1e-12);

/// (mu)_lambda = prod_j (mu - d/2 (j-1))_{lambda_j}.
Rational pochhammer_gen(const Rational& mu, const Partition& lambda, const ConeStructure& cone);
Complex pochhammer_gen(Complex mu, const Partition& lambda, const ConeStructure& cone);
double pochhammer_gen(double mu, const Partition& lambda, const ConeStructure& cone);

/// Wallach set {0, d/2, ..., mu0} u (mu0, inf).
bool wallach_contains(const Rational& nu, const ConeStructure& cone);
/// Float input: lattice points are recognized within `tol`.
bool wallach_contains(double nu, const ConeStructure& cone, double tol = 1e-12);

/// W_{q,d} = {0, d/2, ..., mu0} u {Re nu > mu0}.
bool wqd_contains(const Rational& nu, const ConeStructure& cone);
bool wqd_contains(Complex nu, const ConeStructure& cone, double tol = 1e-12);

struct PoleWindow {
  Rational lo;
  Rational hi;
  bool lo_closed = true;
  bool hi_closed = true;
};

/// Poles of Gamma_Omega, i.e. {0, d/2, ..., mu0} - N_0, inside the window, ascending.
std::vector<Rational> gamma_poles(const ConeStructure& cone, const PoleWindow& window);

/// Z_lambda(e) = C^{2/d}_lambda(1, ..., 1), exact.
Rational zlambda_at_identity(const Partition& lambda, const ConeStructure& cone);

}  // namespace jcone
