#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcone/jordan.hpp"
#include "jcone/symfun.hpp"

#include <cmath>
#include <random>

using namespace jcone;

namespace {

ConeElement random_hermitian(Field f, int q, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  SmallMat m(q);
  for (int i = 0; i < q; ++i) {
    m(i, i) = g(rng);
    for (int j = i + 1; j < q; ++j) {
      Complex z(g(rng), f == Field::Complex ? g(rng) : 0.0);
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return {f, m};
}

ConeElement random_pd(Field f, int q, std::mt19937_64& rng) {
  auto x = random_hermitian(f, q, rng);
  SmallMat m = x.matrix() * x.matrix() + 0.1 * SmallMat::identity(q);
  return {f, m};
}

ConeElement random_omega_e(Field f, int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> spec(q);
  for (auto& s : spec) s = u(rng);
  return ConeElement::from_spectrum(f, spec).conjugated(haar_group(f, q, rng));
}

double max_abs(const SmallMat& m) {
  double r = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

}  // namespace

TEST_CASE("eigenvalues basic") {
  auto id = ConeElement::identity(Field::Real, 2);
  CHECK(id.eigenvalues() == std::vector<double>{1, 1});
  std::vector<double> d{1, 3};
  auto x = ConeElement::from_spectrum(Field::Real, d);
  CHECK(x.eigenvalues()[0] == doctest::Approx(3));
  CHECK(x.eigenvalues()[1] == doctest::Approx(1));
}

TEST_CASE("2x2 closed form oracle, real and complex") {
  std::mt19937_64 rng(4);
  for (Field f : {Field::Real, Field::Complex}) {
    for (int t = 0; t < 500; ++t) {
      auto x = random_hermitian(f, 2, rng);
      double a = x.matrix()(0, 0).real(), b = x.matrix()(1, 1).real();
      double c2 = std::norm(x.matrix()(0, 1));
      double disc = std::sqrt((a - b) * (a - b) / 4 + c2);
      double hi = (a + b) / 2 + disc, lo = (a + b) / 2 - disc;
      CHECK(std::abs(x.eigenvalues()[0] - hi) < 1e-12 * std::max(1.0, std::abs(hi)));
      CHECK(std::abs(x.eigenvalues()[1] - lo) < 1e-12 * std::max(1.0, std::abs(hi)));
    }
  }
}

TEST_CASE("eigen decomposition reconstructs, trace and determinant") {
  std::mt19937_64 rng(5);
  for (Field f : {Field::Real, Field::Complex}) {
    for (int q = 1; q <= 3; ++q) {
      for (int t = 0; t < 200; ++t) {
        auto x = random_hermitian(f, q, rng, 3.0);
        const auto& v = x.eigenvectors();
        SmallMat back = v * SmallMat::diagonal(x.eigenvalues()) * v.adjoint();
        CHECK(max_abs(back - x.matrix()) < 1e-12 * std::max(1.0, x.matrix().frobenius()));
        CHECK(max_abs(v.adjoint() * v - SmallMat::identity(q)) < 1e-13);
        for (int i = 1; i < q; ++i) CHECK(x.eigenvalues()[i - 1] >= x.eigenvalues()[i]);
        auto dt = det_trace(x);
        CHECK(std::abs(dt.trace - x.matrix().trace().real()) < 1e-10);
        Complex cof = determinant(x.matrix());
        CHECK(std::abs(dt.det - cof.real()) < 1e-10 * std::max(1.0, std::abs(cof)));
        CHECK(std::abs(cof.imag()) < 1e-10 * std::max(1.0, std::abs(cof)));
      }
    }
  }
  std::vector<double> d{2, 0.5};
  auto dt = det_trace(ConeElement::from_spectrum(Field::Real, d));
  CHECK(dt.det == doctest::Approx(1));
  CHECK(dt.trace == doctest::Approx(2.5));
  auto idt = det_trace(ConeElement::identity(Field::Complex, 3));
  CHECK(idt.det == doctest::Approx(1));
  CHECK(idt.trace == doctest::Approx(3));
}

TEST_CASE("non-Hermitian input is rejected") {
  SmallMat m(2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(ConeElement(Field::Real, m), std::invalid_argument);
  SmallMat c(2);
  c(0, 1) = Complex(0, 1);
  c(1, 0) = Complex(0, -1);
  CHECK_THROWS_AS(ConeElement(Field::Real, c), std::invalid_argument);
  CHECK_NOTHROW(ConeElement(Field::Complex, c));
}

TEST_CASE("K-invariance of spectra") {
  std::mt19937_64 rng(6);
  for (Field f : {Field::Real, Field::Complex}) {
    for (int q = 1; q <= 3; ++q) {
      for (int t = 0; t < 100; ++t) {
        auto x = random_hermitian(f, q, rng);
        SmallMat u = haar_group(f, q, rng);
        CHECK(max_abs(u.adjoint() * u - SmallMat::identity(q)) < 1e-13);
        auto y = x.conjugated(u);
        for (int i = 0; i < q; ++i) CHECK(std::abs(x.eigenvalues()[i] - y.eigenvalues()[i]) < 1e-10);
        double a = 2.0 / (f == Field::Real ? 1 : 2);
        double zx = jack_eval(Partition{2, 1}, a, x.eigenvalues());
        double zy = jack_eval(Partition{2, 1}, a, y.eigenvalues());
        CHECK(std::abs(zx - zy) < 1e-10 * std::max(1.0, std::abs(zx)));
      }
    }
  }
}

TEST_CASE("quad_rep") {
  std::mt19937_64 rng(7);
  for (Field f : {Field::Real, Field::Complex}) {
    for (int q = 1; q <= 3; ++q) {
      double a = f == Field::Real ? 2.0 : 1.0;
      for (int t = 0; t < 50; ++t) {
        auto y = random_hermitian(f, q, rng);
        CHECK(max_abs(quad_rep(ConeElement::identity(f, q), y).matrix() - y.matrix()) < 1e-14);
        auto r = random_pd(f, q, rng), s = random_pd(f, q, rng);
        auto sr = sqrt_psd(r), ss = sqrt_psd(s);
        CHECK(max_abs(quad_rep(sr, ConeElement::identity(f, q)).matrix() - r.matrix()) < 1e-9);
        auto rs = quad_rep(sr, s), sr2 = quad_rep(ss, r);
        for (int i = 0; i < q; ++i)
          CHECK(std::abs(rs.eigenvalues()[i] - sr2.eigenvalues()[i]) < 1e-9 * std::max(1.0, rs.eigenvalues()[0]));
        for (const auto& lam : enumerate_partitions_upto(4, q)) {
          double z1 = jack_eval(lam, a, rs.eigenvalues()), z2 = jack_eval(lam, a, sr2.eigenvalues());
          CHECK(std::abs(z1 - z2) < 1e-8 * std::max(1.0, std::abs(z1)));
        }
        auto re = random_omega_e(f, q, rng), se = random_omega_e(f, q, rng);
        CHECK(in_omega_e(quad_rep(sqrt_psd(se), re)));
      }
    }
  }
}

TEST_CASE("sqrt_psd and membership") {
  std::vector<double> d{4, 9};
  auto s = sqrt_psd(ConeElement::from_spectrum(Field::Real, d));
  CHECK(std::abs(s.matrix()(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(s.matrix()(1, 1) - 3.0) < 1e-14);
  CHECK(max_abs(sqrt_psd(ConeElement::identity(Field::Complex, 3)).matrix() - SmallMat::identity(3)) < 1e-15);
  std::mt19937_64 rng(8);
  for (Field f : {Field::Real, Field::Complex})
    for (int q = 1; q <= 3; ++q)
      for (int t = 0; t < 100; ++t) {
        auto x = random_pd(f, q, rng);
        auto r = sqrt_psd(x);
        CHECK(max_abs(r.matrix() * r.matrix() - x.matrix()) < 1e-9);
        auto ir = inv_sqrt_pd(x);
        CHECK(max_abs(ir.matrix() * x.matrix() * ir.matrix() - SmallMat::identity(q)) < 1e-9);
      }
  std::vector<double> neg{1, -1};
  CHECK_THROWS_AS(sqrt_psd(ConeElement::from_spectrum(Field::Real, neg)), std::domain_error);
  std::vector<double> tiny{1, -1e-13};
  CHECK_NOTHROW(sqrt_psd(ConeElement::from_spectrum(Field::Real, tiny)));

  std::vector<double> half{0.5, 0.5}, bad{0.5, 1.5};
  CHECK(in_omega_e(ConeElement::from_spectrum(Field::Real, half)));
  CHECK_FALSE(in_omega_e(ConeElement::identity(Field::Real, 2)));
  CHECK_FALSE(in_omega_e(ConeElement::from_spectrum(Field::Real, bad)));
  CHECK(in_omega_bar(ConeElement::zero(Field::Real, 2)));
  CHECK_FALSE(in_omega(ConeElement::zero(Field::Real, 2)));
}

TEST_CASE("symmetric_eigen on larger matrices") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int n : {1, 4, 12, 41}) {
    std::vector<double> a(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = g(rng);
    auto e = symmetric_eigen(a, n);
    for (int j = 0; j < n; ++j) {
      double res = 0;
      for (int i = 0; i < n; ++i) {
        double av = 0;
        for (int k = 0; k < n; ++k) av += a[i * n + k] * e.vectors[k * n + j];
        res = std::max(res, std::abs(av - e.values[j] * e.vectors[i * n + j]));
      }
      CHECK(res < 1e-11);
    }
    for (int j = 1; j < n; ++j) CHECK(e.values[j - 1] <= e.values[j]);
    double tr = 0, sum = 0;
    for (int i = 0; i < n; ++i) tr += a[i * n + i];
    for (double v : e.values) sum += v;
    CHECK(std::abs(tr - sum) < 1e-10);
  }
  // Hilbert matrix: tiny but positive eigenvalues
  int n = 6;
  std::vector<double> h(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[i * n + j] = 1.0 / (i + j + 1);
  auto e = symmetric_eigen(h, n);
  CHECK(e.values[0] > 0);
  CHECK(e.values[0] == doctest::Approx(1.0827994845e-7).epsilon(1e-6));
}
