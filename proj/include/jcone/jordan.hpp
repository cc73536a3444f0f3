#pragma once

#include "jcone/cone.hpp"
#include "jcone/rational.hpp"

#include <array>
#include <random>
#include <span>
#include <vector>

namespace jcone {

/// Dense complex matrix of size at most 3 x 3, stored inline.
class SmallMat {
 public:
  static constexpr int kMax = 3;

  SmallMat() = default;
  explicit SmallMat(int n);

  static SmallMat identity(int n);
  static SmallMat diagonal(std::span<const double> d);

  int size() const { return n_; }
  Complex& operator()(int i, int j) { return a_[i * kMax + j]; }
  const Complex& operator()(int i, int j) const { return a_[i * kMax + j]; }

  SmallMat adjoint() const;
  Complex trace() const;
  double frobenius() const;

  friend SmallMat operator*(const SmallMat& x, const SmallMat& y);
  friend SmallMat operator+(const SmallMat& x, const SmallMat& y);
  friend SmallMat operator-(const SmallMat& x, const SmallMat& y);
  friend SmallMat operator*(double s, const SmallMat& x);

 private:
  int n_ = 0;
  std::array<Complex, kMax * kMax> a_{};
};

/// Determinant by cofactor expansion.
Complex determinant(const SmallMat& m);

/// Re tr(x^* y), the real inner product on M_q(F).
double real_inner(const SmallMat& x, const SmallMat& y);

struct HermitianEigen {
  std::vector<double> values;  // decreasing
  SmallMat vectors;            // unitary, columns are eigenvectors
};

/// Cyclic complex Jacobi. Each rotation first rephases the pivot entry to be
/// real with diag(1, e^{-i phi}), then applies a real Givens rotation.
HermitianEigen hermitian_eigen(const SmallMat& h, double tol = 1e-13);

/// Boundary tolerance for membership in Omega, Omega-bar and Omega_e.
struct ConeTolerance {
  double boundary = 1e-12;
  double hermitian = 1e-12;
};

/// Hermitian q x q matrix over the cone's field with cached spectral data.
class ConeElement {
 public:
  ConeElement(Field field, SmallMat m, ConeTolerance tol = {});

  static ConeElement identity(Field field, int q);
  static ConeElement zero(Field field, int q);
  static ConeElement from_spectrum(Field field, std::span<const double> spectrum);

  Field field() const { return field_; }
  int rank() const { return m_.size(); }
  const SmallMat& matrix() const { return m_; }
  const std::vector<double>& eigenvalues() const { return eig_.values; }
  const SmallMat& eigenvectors() const { return eig_.vectors; }

  /// U x U^*, re-diagonalized.
  ConeElement conjugated(const SmallMat& u) const;

 private:
  Field field_;
  SmallMat m_;
  HermitianEigen eig_;
};

const std::vector<double>& eigenvalues(const ConeElement& x);

struct DetTrace {
  double det;
  double trace;
};
DetTrace det_trace(const ConeElement& x);

/// P(x) y = x y x.
ConeElement quad_rep(const ConeElement& x, const ConeElement& y);

/// PSD square root; eigenvalues in [-tol, 0) are clamped to 0.
ConeElement sqrt_psd(const ConeElement& x, ConeTolerance tol = {});

/// Inverse square root of a positive definite element.
ConeElement inv_sqrt_pd(const ConeElement& x, ConeTolerance tol = {});

bool in_omega(const ConeElement& x, ConeTolerance tol = {});
bool in_omega_bar(const ConeElement& x, ConeTolerance tol = {});
bool in_omega_e(const ConeElement& x, ConeTolerance tol = {});

/// Haar-distributed orthogonal (Real) or unitary (Complex) q x q matrix:
/// Gram-Schmidt applied to a Gaussian matrix.
SmallMat haar_group(Field field, int q, std::mt19937_64& rng);

/// Standard Gaussian p x q block; each real component has the given variance.
std::vector<Complex> gaussian_block(Field field, int p, int q, double variance, std::mt19937_64& rng);

/// X^* X for a p x q row-major block.
SmallMat gram(std::span<const Complex> x, int p, int q);

/// Real symmetric eigenproblem of any size (row-major input), cyclic Jacobi.
struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major, column j is the eigenvector of values[j]
};
SymmetricEigen symmetric_eigen(std::vector<double> a, int n, double tol = 1e-14);

}  // namespace jcone
