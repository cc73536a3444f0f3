#include "jcone/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace jcone {

SmallMat::SmallMat(int n) : n_(n) {
  if (n < 1 || n > kMax) throw std::invalid_argument("SmallMat size must be in 1..3");
}

SmallMat SmallMat::identity(int n) {
  SmallMat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallMat SmallMat::diagonal(std::span<const double> d) {
  SmallMat m(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

SmallMat SmallMat::adjoint() const {
  SmallMat r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

Complex SmallMat::trace() const {
  Complex t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SmallMat::frobenius() const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += std::norm((*this)(i, j));
  return std::sqrt(s);
}

SmallMat operator*(const SmallMat& x, const SmallMat& y) {
  if (x.n_ != y.n_) throw std::invalid_argument("matrix size mismatch");
  SmallMat r(x.n_);
  for (int i = 0; i < x.n_; ++i)
    for (int k = 0; k < x.n_; ++k) {
      Complex xik = x(i, k);
      for (int j = 0; j < x.n_; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

SmallMat operator+(const SmallMat& x, const SmallMat& y) {
  if (x.n_ != y.n_) throw std::invalid_argument("matrix size mismatch");
  SmallMat r(x.n_);
  for (int i = 0; i < x.n_ * SmallMat::kMax; ++i) r.a_[i] = x.a_[i] + y.a_[i];
  return r;
}

SmallMat operator-(const SmallMat& x, const SmallMat& y) {
  if (x.n_ != y.n_) throw std::invalid_argument("matrix size mismatch");
  SmallMat r(x.n_);
  for (int i = 0; i < x.n_ * SmallMat::kMax; ++i) r.a_[i] = x.a_[i] - y.a_[i];
  return r;
}

SmallMat operator*(double s, const SmallMat& x) {
  SmallMat r(x.n_);
  for (int i = 0; i < x.n_ * SmallMat::kMax; ++i) r.a_[i] = s * x.a_[i];
  return r;
}

Complex determinant(const SmallMat& m) {
  switch (m.size()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
}

double real_inner(const SmallMat& x, const SmallMat& y) {
  double s = 0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) s += (std::conj(x(i, j)) * y(i, j)).real();
  return s;
}

HermitianEigen hermitian_eigen(const SmallMat& h, double tol) {
  const int n = h.size();
  SmallMat a = h;
  SmallMat v = SmallMat::identity(n);
  double scale = std::max(h.frobenius(), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2 * off) <= tol * scale) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        Complex c = a(p, q);
        double g = std::abs(c);
        if (g == 0) continue;
        Complex phase = c / g;
        double tau = (a(q, q).real() - a(p, p).real()) / (2 * g);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        double cs = 1 / std::sqrt(1 + t * t);
        double sn = t * cs;
        // J = diag(1, conj(phase)) * [[cs, sn], [-sn, cs]] on rows/cols p, q
        SmallMat j = SmallMat::identity(n);
        j(p, p) = cs;
        j(p, q) = sn;
        j(q, p) = -sn * std::conj(phase);
        j(q, q) = cs * std::conj(phase);
        a = j.adjoint() * a * j;
        a(p, q) = a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) a(i, i) = a(i, i).real();
        v = v * j;
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x).real() > a(y, y).real(); });
  HermitianEigen out;
  out.vectors = SmallMat(n);
  for (int c = 0; c < n; ++c) {
    out.values.push_back(a(order[c], order[c]).real());
    for (int r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

ConeElement::ConeElement(Field field, SmallMat m, ConeTolerance tol) : field_(field), m_(m) {
  const int n = m_.size();
  double scale = std::max(1.0, m_.frobenius());
  for (int i = 0; i < n; ++i) {
    if (std::abs(m_(i, i).imag()) > tol.hermitian * scale)
      throw std::invalid_argument("matrix is not Hermitian (complex diagonal)");
    m_(i, i) = m_(i, i).real();
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(m_(i, j) - std::conj(m_(j, i))) > tol.hermitian * scale)
        throw std::invalid_argument("matrix is not Hermitian");
      if (field == Field::Real && (std::abs(m_(i, j).imag()) > tol.hermitian * scale))
        throw std::invalid_argument("real-field matrix has complex entries");
      Complex avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
      if (field == Field::Real) avg = avg.real();
      m_(i, j) = avg;
      m_(j, i) = std::conj(avg);
    }
  }
  eig_ = hermitian_eigen(m_);
}

ConeElement ConeElement::identity(Field field, int q) { return {field, SmallMat::identity(q)}; }

ConeElement ConeElement::zero(Field field, int q) { return {field, SmallMat(q)}; }

ConeElement ConeElement::from_spectrum(Field field, std::span<const double> spectrum) {
  return {field, SmallMat::diagonal(spectrum)};
}

ConeElement ConeElement::conjugated(const SmallMat& u) const { return {field_, u * m_ * u.adjoint()}; }

const std::vector<double>& eigenvalues(const ConeElement& x) { return x.eigenvalues(); }

DetTrace det_trace(const ConeElement& x) {
  double det = 1, tr = 0;
  for (double v : x.eigenvalues()) {
    det *= v;
    tr += v;
  }
  return {det, tr};
}

ConeElement quad_rep(const ConeElement& x, const ConeElement& y) {
  return {x.field(), x.matrix() * y.matrix() * x.matrix()};
}

namespace {

ConeElement spectral_map(const ConeElement& x, std::vector<double> f) {
  const SmallMat& v = x.eigenvectors();
  return {x.field(), v * SmallMat::diagonal(f) * v.adjoint()};
}

}  // namespace

ConeElement sqrt_psd(const ConeElement& x, ConeTolerance tol) {
  std::vector<double> f;
  for (double v : x.eigenvalues()) {
    if (v < -tol.boundary) throw std::domain_error("sqrt_psd: matrix is not positive semidefinite");
    f.push_back(std::sqrt(std::max(v, 0.0)));
  }
  return spectral_map(x, std::move(f));
}

ConeElement inv_sqrt_pd(const ConeElement& x, ConeTolerance tol) {
  std::vector<double> f;
  for (double v : x.eigenvalues()) {
    if (v <= tol.boundary) throw std::domain_error("inv_sqrt_pd: matrix is not positive definite");
    f.push_back(1 / std::sqrt(v));
  }
  return spectral_map(x, std::move(f));
}

bool in_omega(const ConeElement& x, ConeTolerance tol) {
  return x.eigenvalues().back() > tol.boundary;
}

bool in_omega_bar(const ConeElement& x, ConeTolerance tol) {
  return x.eigenvalues().back() >= -tol.boundary;
}

bool in_omega_e(const ConeElement& x, ConeTolerance tol) {
  return x.eigenvalues().back() > tol.boundary && x.eigenvalues().front() < 1 - tol.boundary;
}

std::vector<Complex> gaussian_block(Field field, int p, int q, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(variance));
  std::vector<Complex> out(static_cast<std::size_t>(p) * q);
  for (auto& z : out) {
    double re = g(rng);
    double im = field == Field::Complex ? g(rng) : 0.0;
    z = Complex(re, im);
  }
  return out;
}

SmallMat gram(std::span<const Complex> x, int p, int q) {
  SmallMat w(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      Complex s = 0.0;
      for (int r = 0; r < p; ++r) s += std::conj(x[r * q + i]) * x[r * q + j];
      w(i, j) = s;
    }
  return w;
}

SmallMat haar_group(Field field, int q, std::mt19937_64& rng) {
  auto g = gaussian_block(field, q, q, 1.0, rng);
  SmallMat u(q);
  for (int c = 0; c < q; ++c) {
    std::array<Complex, SmallMat::kMax> col{};
    for (int r = 0; r < q; ++r) col[r] = g[r * q + c];
    for (int prev = 0; prev < c; ++prev) {
      Complex dot = 0.0;
      for (int r = 0; r < q; ++r) dot += std::conj(u(r, prev)) * col[r];
      for (int r = 0; r < q; ++r) col[r] -= dot * u(r, prev);
    }
    double norm = 0;
    for (int r = 0; r < q; ++r) norm += std::norm(col[r]);
    norm = std::sqrt(norm);
    for (int r = 0; r < q; ++r) u(r, c) = col[r] / norm;
  }
  return u;
}

SymmetricEigen symmetric_eigen(std::vector<double> a, int n, double tol) {
  if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("symmetric_eigen: size mismatch");
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[i * n + i] = 1;
  auto at = [&](int i, int j) -> double& { return a[i * n + j]; };
  double scale = 0;
  for (double x : a) scale += x * x;
  scale = std::max(std::sqrt(scale), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (std::sqrt(2 * off) <= tol * scale) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double g = at(p, q);
        if (g == 0) continue;
        double tau = (at(q, q) - at(p, p)) / (2 * g);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        double c = 1 / std::sqrt(1 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0;
        for (int k = 0; k < n; ++k) {
          double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return at(x, x) < at(y, y); });
  SymmetricEigen out;
  out.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    out.values.push_back(at(order[c], order[c]));
    for (int r = 0; r < n; ++r) out.vectors[r * n + c] = v[r * n + order[c]];
  }
  return out;
}

}  // namespace jcone
