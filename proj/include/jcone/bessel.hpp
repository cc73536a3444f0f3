#pragma once

#include "jcone/cone.hpp"
#include "jcone/jordan.hpp"
#include "jcone/symfun.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace jcone {

struct TruncationControl {
  int max_degree = 60;
  double rel_tol = 1e-12;
  int stagnation_window = 3;

  void validate() const;
};

class ZeroPochhammer : public std::domain_error {
 public:
  ZeroPochhammer(const std::string& what, Partition lambda) : std::domain_error(what), lambda_(std::move(lambda)) {}
  const Partition& partition() const { return lambda_; }

 private:
  Partition lambda_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_block) : std::runtime_error(what), last_block_(last_block) {}
  double last_block() const { return last_block_; }

 private:
  double last_block_;
};

struct BesselValue {
  Complex value;
  int degree = 0;           // last degree block included
  double last_block = 0.0;  // |block| at that degree
};

/// Truncated partition series of J_mu for one (mu, cone). Coefficients are
/// folded into the monomial basis once per degree, so each evaluation costs
/// one pass over monomials of the spectrum.
class BesselSeries {
 public:
  BesselSeries(Complex mu, const ConeStructure& cone, TruncationControl ctl = {});

  Complex mu() const { return mu_; }
  const ConeStructure& cone() const { return cone_; }
  const TruncationControl& control() const { return ctl_; }

  /// J_mu at a point with the given eigenvalues.
  BesselValue evaluate(std::span<const double> spectrum) const;

  /// J_mu(-r) for r with the given (nonnegative) eigenvalues, summed as a
  /// series of nonnegative terms. Requires real mu > mu0.
  BesselValue evaluate_negative(std::span<const double> spectrum) const;

  /// sum_{|lambda| = k} coefficient_lambda Z_lambda(xi) for a single degree.
  Complex block(int k, std::span<const double> spectrum) const;

 private:
  // Extended precision keeps the alternating sum accurate well past the
  // point where the largest term exceeds the result by 1e8.
  using Wide = long double;
  using WideComplex = std::complex<long double>;

  struct DegreeBlock {
    std::vector<std::vector<std::vector<int>>> perms;
    std::vector<WideComplex> coeff;  // monomial-basis coefficient per partition
  };

  WideComplex wide_block(int k, std::span<const double> spectrum) const;

  BesselValue sum(std::span<const double> spectrum, bool negative) const;

  Complex mu_;
  ConeStructure cone_;
  TruncationControl ctl_;
  std::vector<DegreeBlock> blocks_;
  std::optional<Partition> first_zero_;  // first partition with (mu)_lambda = 0
};

BesselValue bessel_eval(Complex mu, const ConeElement& x, const ConeStructure& cone, TruncationControl ctl = {});
BesselValue bessel_at_neg(double mu, const ConeElement& r, const ConeStructure& cone, TruncationControl ctl = {});

/// Where bound_check draws its random spectra.
enum class BoundDomain {
  Symmetric,  // spectra uniform in [-R, R]: all of V
  ClosedCone  // spectra uniform in [0, R]: the closed cone
};

struct BoundReport {
  double max_abs = 0;
  double bound = 0;
  std::vector<double> witness;  // spectrum attaining max_abs
  std::uint64_t samples = 0;
  bool violated = false;
};

/// Largest |J_mu(x)| over random x; x = U diag(xi) U^* with Haar U.
BoundReport bound_check(double mu, const ConeStructure& cone, std::uint64_t samples, std::uint64_t seed,
                        TruncationControl ctl = {}, double radius = 20.0, BoundDomain domain = BoundDomain::Symmetric,
                        double slack = 1e-6, int jobs = 1);

struct McEstimate {
  Complex value;
  double se_re = 0;
  double se_im = 0;
  std::uint64_t samples = 0;
  std::uint64_t attempts = 0;
};

class LowAcceptance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Self-normalized ball estimate of J_mu(x^2). `samples` counts accepted
/// points; the standard error is the delta-method error of the ratio.
McEstimate laplace_ball_mc(Complex mu, const ConeElement& x, const ConeStructure& cone, std::uint64_t samples,
                           std::uint64_t seed, int jobs = 1);

/// Haar average of exp(-2i <u, x>) over O(q) or U(q); estimates J_{qd/2}(x^* x).
McEstimate group_integral_mc(const SmallMat& x, const ConeStructure& cone, std::uint64_t samples, std::uint64_t seed,
                             int jobs = 1);

}  // namespace jcone
