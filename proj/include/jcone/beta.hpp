#pragma once

#include "jcone/cone.hpp"
#include "jcone/jordan.hpp"
#include "jcone/symfun.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

namespace jcone {

// ---------------------------------------------------------------------------
// Density and samplers

/// Normalized beta density Delta(x)^{mu-n/q} Delta(e-x)^{nu-n/q} / B_Omega(mu, nu) on Omega_e.
double beta_density(const ConeElement& x, double mu, double nu, const ConeStructure& cone);

/// How one Wishart-type factor is generated.
struct WishartFactor {
  enum class Kind { Bartlett, Gram };
  Kind kind = Kind::Bartlett;
  double shape = 0;  // Bartlett: cone parameter, must exceed mu0
  int rows = 0;      // Gram: W = X^* X with X Gaussian rows x q

  static WishartFactor bartlett(double shape) { return {Kind::Bartlett, shape, 0}; }
  static WishartFactor gram(int rows) { return {Kind::Gram, 0, rows}; }

  /// Cone parameter of the law: shape, or rows d / 2.
  double parameter(const ConeStructure& cone) const;
};

/// Bartlett factor: W = L L^* with (L_ii)^2 ~ Gamma(shape - (i-1) d/2, 1) and
/// below-diagonal entries Gaussian with variance 1/2 per real component.
SmallMat sample_wishart(const WishartFactor& f, const ConeStructure& cone, std::mt19937_64& rng);

/// S = (W1 + W2)^{-1/2} W1 (W1 + W2)^{-1/2}.
class BetaSampler {
 public:
  BetaSampler(WishartFactor first, WishartFactor second, const ConeStructure& cone);

  /// Density regime (both > mu0) uses Bartlett factors; a parameter that is not
  /// above mu0 must be a lattice point p d/2 and is realized as a Gram factor.
  static BetaSampler for_parameters(double mu, double nu, const ConeStructure& cone);
  /// Group case: mu = p d/2, nu = pt d/2, p >= q.
  static BetaSampler group_case(int p, int pt, const ConeStructure& cone);

  ConeElement draw(std::mt19937_64& rng) const;

  double mu() const { return first_.parameter(cone_); }
  double nu() const { return second_.parameter(cone_); }
  const ConeStructure& cone() const { return cone_; }
  std::string describe() const;

 private:
  WishartFactor first_;
  WishartFactor second_;
  ConeStructure cone_;
};

std::vector<ConeElement> sample_beta(double mu, double nu, const ConeStructure& cone, std::uint64_t n,
                                     std::uint64_t seed, int jobs = 1);
std::vector<ConeElement> sample_beta_singular(int p, int pt, const ConeStructure& cone, std::uint64_t n,
                                              std::uint64_t seed, int jobs = 1);

/// Draws `n` samples with per-chunk streams and returns them in index order.
std::vector<ConeElement> sample_stream(const BetaSampler& sampler, std::uint64_t n, std::uint64_t seed, int jobs);

// ---------------------------------------------------------------------------
// Exact moment functional

/// (mu + nu)_lambda vanishes: the functional has a pole at this partition.
class MomentPole : public std::domain_error {
 public:
  MomentPole(const std::string& what, Partition lambda) : std::domain_error(what), lambda_(std::move(lambda)) {}
  const Partition& partition() const { return lambda_; }

 private:
  Partition lambda_;
};

/// L(Z_lambda) = (mu)_lambda Z_lambda(e) / (mu + nu)_lambda, the beta measure
/// (or its analytic continuation in nu) acting on K-invariant polynomials.
class MomentFunctional {
 public:
  MomentFunctional(ExactBetaParams params, ConeStructure cone, SymCaps caps = {});

  const ExactBetaParams& params() const { return params_; }
  const ConeStructure& cone() const { return cone_; }
  const JackTable<Rational>& table() const { return *table_; }

  /// nullopt marks a pole.
  std::optional<Rational> jack_value(const Partition& lambda) const;
  std::optional<Rational> monomial_value(const Partition& kappa) const;

  /// Throw MomentPole at poles.
  Rational value(const Partition& lambda) const;
  Rational apply(const SymPolynomial<Rational>& p) const;

 private:
  void fill_degree(int k) const;

  ExactBetaParams params_;
  ConeStructure cone_;
  std::shared_ptr<const JackTable<Rational>> table_;
  mutable std::shared_mutex mutex_;
  mutable std::map<int, std::vector<std::optional<Rational>>> jack_;      // by degree, table order
  mutable std::map<int, std::vector<std::optional<Rational>>> monomial_;  // by degree, table order
};

/// Degree cap needed for moment matrices up to degree D at rank q.
SymCaps moment_caps(int dmax, int q);

Rational moment_value(const Partition& lambda, const ExactBetaParams& params, const ConeStructure& cone);
Complex moment_value(const Partition& lambda, const BetaParams& params, const ConeStructure& cone);
Rational moment_of_polynomial(const SymPolynomial<Rational>& p, const ExactBetaParams& params,
                              const ConeStructure& cone);

enum class Localizer { One, DetX, DetEminusX };
const char* localizer_name(Localizer l);
Localizer parse_localizer(const std::string& name);

/// The localizing polynomial in the monomial basis: 1, m_(1^q), or sum_j (-1)^j e_j.
SymPolynomial<Rational> localizer_polynomial(Localizer l, int q);

struct MomentMatrix {
  int degree = 0;
  Localizer localizer = Localizer::One;
  std::vector<Partition> index;  // weight <= degree, canonical order
  std::vector<Rational> entries;  // row-major, symmetric

  int size() const { return static_cast<int>(index.size()); }
  const Rational& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * size() + j]; }
  std::vector<double> to_double() const;
};

MomentMatrix moment_matrix(int degree, Localizer localizer, const MomentFunctional& L);

/// Exact inertia test. A negative witness v satisfies v^T M v < 0.
struct PsdAnalysis {
  bool psd = true;
  int rank = 0;
  std::vector<Rational> witness;  // empty if psd
  Rational witness_value;         // v^T M v
  double min_eigenvalue = 0;      // float, from Jacobi
  std::vector<double> min_eigenvector;
};

PsdAnalysis analyze_psd(const MomentMatrix& m);

struct NegativeWitness {
  int degree = 0;
  Localizer localizer = Localizer::One;
  std::vector<Partition> index;
  std::vector<Rational> vector;  // coefficients of p = sum v_kappa m_kappa
  Rational value;                // L(localizer p^2) < 0
  double min_eigenvalue = 0;
};

struct PositivityVerdict {
  std::optional<NegativeWitness> witness;  // set: conclusive non-positivity
  int dmax = 0;
  int k = 0;                     // extension level used for the hypothesis
  bool hypothesis_met = false;   // mu > mu0 + k q + 3/2
  bool conclusive() const { return witness.has_value(); }
};

/// Scans D = 1..dmax and all localizers for a negative moment-matrix direction.
PositivityVerdict positivity_classify(const Rational& mu, const Rational& nu, const ConeStructure& cone, int dmax,
                                      bool require_hypothesis = true);

// ---------------------------------------------------------------------------
// Rank-1 extension by integration by parts

/// beta(phi) = Gamma(mu+nu)/(Gamma(mu) Gamma(nu+k)) int_0^1 (phi(x) x^{mu-1})^{(k)} (1-x)^{nu+k-1} dx
/// for phi(x) = sum_m coeffs[m] x^m. Requires mu > k, nu + k > 0.
Rational dist_ext_rank1_exact(const std::vector<Rational>& coeffs, const Rational& mu, const Rational& nu, int k);
double dist_ext_rank1(const std::vector<double>& coeffs, double mu, double nu, int k);

// ---------------------------------------------------------------------------
// Product relation Delta(e-x) beta_{mu,nu} = c beta_{mu,nu+1}

struct ProductRelationReport {
  Rational factor;              // prod_j (nu - j d/2) / (mu + nu - j d/2)
  Rational max_discrepancy;     // over all monomials up to the degree
  int polynomials = 0;
  std::vector<std::pair<Partition, Rational>> lhs;  // L_nu(Delta(e-x) m_kappa)
};

ProductRelationReport product_relation_check(const Rational& mu, const Rational& nu, const ConeStructure& cone,
                                             int degree);

}  // namespace jcone
