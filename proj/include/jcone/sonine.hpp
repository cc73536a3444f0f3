#pragma once

#include "jcone/beta.hpp"
#include "jcone/bessel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace jcone {

/// j_alpha(z) = 0F1(alpha + 1; -z^2/4) by its power series, alpha > -1.
double j_bessel(double alpha, double z);

struct Rank1SonineReport {
  double alpha = 0, beta = 0;
  double max_residual = 0;
  double worst_z = 0;
  std::size_t points = 0;
};

/// Compares j_{alpha+beta}(z) with
/// 2 Gamma(alpha+beta+1)/(Gamma(alpha+1)Gamma(beta)) int_0^1 j_alpha(zx) x^{2alpha+1} (1-x^2)^{beta-1} dx.
/// The integral is taken in t = 1 - x^2, where it reads
/// (1/2) int_0^1 j_alpha(z sqrt(1-t)) (1-t)^alpha t^{beta-1} dt, and is
/// evaluated by tanh-sinh quadrature (endpoint singularities are algebraic).
Rank1SonineReport sonine_rank1_quadrature(double alpha, double beta, std::span<const double> z);

struct SonineMcReport {
  double exact = 0;  // J_{mu+nu}(r) from the series
  double mean = 0;   // sample mean of J_mu(P(sqrt s) r)
  double residual = 0;
  double se = 0;
  std::uint64_t samples = 0;
};

/// Sonine formula by Monte Carlo with s drawn from `sampler` (density or group case).
SonineMcReport sonine_cone_mc(const BetaSampler& sampler, const ConeElement& r, std::uint64_t samples,
                              std::uint64_t seed, int jobs = 1);
SonineMcReport sonine_cone_mc(double mu, double nu, const ConeElement& r, const ConeStructure& cone,
                              std::uint64_t samples, std::uint64_t seed, int jobs = 1);

struct ExtendedSonineReport {
  int degree = 0;
  int terms = 0;             // partitions checked
  int exact_mismatches = 0;  // coefficient identity failures in exact arithmetic
  std::optional<int> rank1_mismatches;  // q = 1: same identity through dist_ext_rank1_exact
  double max_poly_residual = 0;  // |truncated J_{mu+nu}(r) - beta(truncated J_mu^r)| over the grid
  double max_tail = 0;           // |J_{mu+nu}(r) - truncated J_{mu+nu}(r)| over the grid
};

/// Extended Sonine identity J_{mu+nu}(r) = beta_{mu,nu}(s -> J_mu(P(sqrt s) r)) on
/// degree-K truncations. The K-average of Z_lambda(P(sqrt s) r) is
/// Z_lambda(s) Z_lambda(r) / Z_lambda(e), so the identity reduces to
/// L(Z_lambda) / ((mu)_lambda Z_lambda(e)) = 1 / (mu+nu)_lambda for every lambda.
ExtendedSonineReport sonine_extended_polynomial(const Rational& mu, const Rational& nu, const ConeStructure& cone,
                                                const std::vector<std::vector<double>>& r_grid, int degree);

struct CompositionMoment {
  Partition lambda;
  double expected = 0;
  double mean = 0;
  double se = 0;
  bool within = false;
};

struct CompositionReport {
  std::vector<CompositionMoment> moments;
  std::uint64_t samples = 0;
  bool all_within() const;
};

/// Z_lambda-moments (1 <= |lambda| <= max_degree) of P(sqrt s) r with
/// r ~ beta_{mu,nu1} and s ~ beta_{mu+nu1,nu2}, against moment_value(mu, nu1+nu2).
/// A moment is within when |mean - expected| <= bands * se (or 1e-12 if se = 0).
CompositionReport composition_check(double mu, double nu1, double nu2, const ConeStructure& cone,
                                    std::uint64_t samples, std::uint64_t seed, int jobs = 1, int max_degree = 3,
                                    double bands = 3.0);

enum class TheoremBStatus {
  Positive,      // Wallach member, no obstruction
  Negative,      // non-member, witness found
  Inconclusive,  // non-member, no witness up to dmax
  HardFailure    // Wallach member with a witness
};
const char* theorem_b_status_name(TheoremBStatus s);

struct TheoremBRow {
  Rational nu;
  bool wallach = false;
  PositivityVerdict verdict;
  TheoremBStatus status = TheoremBStatus::Inconclusive;
};

struct TheoremBTable {
  ConeStructure cone;
  Rational mu;
  int dmax = 0;
  std::vector<TheoremBRow> rows;
  bool any_hard_failure() const;
};

/// Pairs wallach_contains(nu) with positivity_classify for each nu. The
/// hypothesis on mu is checked for every row before any classification runs.
TheoremBTable theorem_b_table(const ConeStructure& cone, const Rational& mu, const std::vector<Rational>& nus,
                              int dmax);

}  // namespace jcone
