#include "jcone/cone.hpp"

#include "jcone/symfun.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace jcone {

Field parse_field(const std::string& tag) {
  if (tag == "R" || tag == "r") return Field::Real;
  if (tag == "C" || tag == "c") return Field::Complex;
  throw std::invalid_argument("field must be R or C, got '" + tag + "'");
}

const char* field_tag(Field f) { return f == Field::Real ? "R" : "C"; }

ConeStructure ConeStructure::make(Field field, int q) {
  if (q < 1) throw std::invalid_argument("rank q must be >= 1");
  ConeStructure c;
  c.field = field;
  c.q = q;
  c.d = field == Field::Real ? 1 : 2;
  c.n = q + c.d * q * (q - 1) / 2;
  c.mu0 = Rational(c.d * (q - 1)) / 2;
  c.alpha = Rational(2) / c.d;
  return c;
}

BetaParams BetaParams::make(Complex mu, Complex nu, int k, const ConeStructure& cone) {
  if (k < 0) throw std::invalid_argument("extension level k must be >= 0");
  if (!(nu.real() > cone.mu0_value() - k))
    throw std::invalid_argument("nu is not in E_k: need Re nu > mu0 - k");
  return {mu, nu, k};
}

ExactBetaParams ExactBetaParams::make(Rational mu, Rational nu, int k, const ConeStructure& cone) {
  if (k < 0) throw std::invalid_argument("extension level k must be >= 0");
  if (!(nu > cone.mu0 - k)) throw std::invalid_argument("nu is not in E_k: need nu > mu0 - k");
  return {std::move(mu), std::move(nu), k};
}

BetaParams ExactBetaParams::to_complex() const { return {Complex(to_double(mu)), Complex(to_double(nu)), k}; }

int minimal_extension_level(const Rational& nu, const ConeStructure& cone) {
  int k = 0;
  while (!(nu > cone.mu0 - k)) ++k;
  return k;
}

bool positivity_hypothesis_holds(const Rational& mu, int k, const ConeStructure& cone) {
  return mu > cone.mu0 + Rational(k * cone.q) + Rational(3, 2);
}

bool is_cone_pole(Complex z, const ConeStructure& cone, double tol) {
  for (int j = 1; j <= cone.q; ++j)
    if (is_classical_pole(z - 0.5 * cone.d * (j - 1), tol)) return true;
  return false;
}

namespace {

void check_factor(Complex arg, int j) {
  if (is_classical_pole(arg))
    throw PoleError("Gamma_Omega pole: factor j=" + std::to_string(j) + " is Gamma(" + std::to_string(arg.real()) + ")",
                    j);
}

}  // namespace

Complex gamma_cone(Complex z, const ConeStructure& cone) {
  Complex out = std::pow(2.0 * std::numbers::pi, 0.5 * (cone.n - cone.q));
  for (int j = 1; j <= cone.q; ++j) {
    Complex arg = z - 0.5 * cone.d * (j - 1);
    check_factor(arg, j);
    out *= gamma_classical(arg);
  }
  return out;
}

Complex lgamma_cone(Complex z, const ConeStructure& cone) {
  Complex out = 0.5 * (cone.n - cone.q) * std::log(2.0 * std::numbers::pi);
  for (int j = 1; j <= cone.q; ++j) {
    Complex arg = z - 0.5 * cone.d * (j - 1);
    check_factor(arg, j);
    out += lgamma_classical(arg);
  }
  return out;
}

Complex beta_cone(Complex z, Complex w, const ConeStructure& cone) {
  // Factorwise ratio keeps the prefactor (2 pi)^{(n-q)/2} from being squared and divided.
  Complex out = std::pow(2.0 * std::numbers::pi, 0.5 * (cone.n - cone.q));
  for (int j = 1; j <= cone.q; ++j) {
    Complex s = 0.5 * cone.d * (j - 1);
    check_factor(z - s, j);
    check_factor(w - s, j);
    check_factor(z + w - s, j);
    out *= gamma_classical(z - s) * gamma_classical(w - s) / gamma_classical(z + w - s);
  }
  return out;
}

Rational pochhammer_gen(const Rational& mu, const Partition& lambda, const ConeStructure& cone) {
  Rational out = 1;
  for (int j = 0; j < lambda.length(); ++j) {
    Rational base = mu - cone.half_d() * j;
    for (int i = 0; i < lambda[j]; ++i) out *= base + i;
  }
  return out;
}

Complex pochhammer_gen(Complex mu, const Partition& lambda, const ConeStructure& cone) {
  Complex out = 1.0;
  for (int j = 0; j < lambda.length(); ++j) {
    Complex base = mu - 0.5 * cone.d * j;
    for (int i = 0; i < lambda[j]; ++i) out *= base + static_cast<double>(i);
  }
  return out;
}

double pochhammer_gen(double mu, const Partition& lambda, const ConeStructure& cone) {
  double out = 1.0;
  for (int j = 0; j < lambda.length(); ++j) {
    double base = mu - 0.5 * cone.d * j;
    for (int i = 0; i < lambda[j]; ++i) out *= base + i;
  }
  return out;
}

namespace {

bool on_lattice(const Rational& nu, const ConeStructure& cone) {
  if (nu < 0 || nu > cone.mu0) return false;
  return is_integer(nu / cone.half_d());
}

}  // namespace

bool wallach_contains(const Rational& nu, const ConeStructure& cone) {
  return nu > cone.mu0 || on_lattice(nu, cone);
}

bool wallach_contains(double nu, const ConeStructure& cone, double tol) {
  if (!std::isfinite(nu)) return false;
  if (nu > cone.mu0_value()) return true;
  double h = 0.5 * cone.d;
  double m = std::nearbyint(nu / h);
  return m >= 0 && m <= cone.q - 1 && std::abs(nu - m * h) <= tol;
}

bool wqd_contains(const Rational& nu, const ConeStructure& cone) { return wallach_contains(nu, cone); }

bool wqd_contains(Complex nu, const ConeStructure& cone, double tol) {
  if (nu.real() > cone.mu0_value()) return true;
  if (std::abs(nu.imag()) > tol) return false;
  return wallach_contains(nu.real(), cone, tol);
}

std::vector<Rational> gamma_poles(const ConeStructure& cone, const PoleWindow& w) {
  auto inside = [&](const Rational& p) {
    bool lo_ok = w.lo_closed ? p >= w.lo : p > w.lo;
    bool hi_ok = w.hi_closed ? p <= w.hi : p < w.hi;
    return lo_ok && hi_ok;
  };
  std::set<Rational> found;
  for (int j = 0; j < cone.q; ++j) {
    for (Rational p = cone.half_d() * j; p >= w.lo; p -= 1)
      if (inside(p)) found.insert(p);
  }
  return {found.begin(), found.end()};
}

Rational zlambda_at_identity(const Partition& lambda, const ConeStructure& cone) {
  if (lambda.length() > cone.q) return Rational(0);
  SymCaps caps;
  caps.max_degree = std::max(caps.max_degree, lambda.weight());
  caps.max_rank = std::max(caps.max_rank, cone.q);
  return jack_at_ones(lambda, *jack_table(cone.alpha, cone.q, caps));
}

}  // namespace jcone
