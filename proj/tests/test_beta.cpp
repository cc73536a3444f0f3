#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcone/beta.hpp"
#include "jcone/mc.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace jcone;

namespace {

const ConeStructure kR1 = ConeStructure::make(Field::Real, 1);
const ConeStructure kR2 = ConeStructure::make(Field::Real, 2);
const ConeStructure kC2 = ConeStructure::make(Field::Complex, 2);
const ConeStructure kR3 = ConeStructure::make(Field::Real, 3);
const ConeStructure kC3 = ConeStructure::make(Field::Complex, 3);

Rational R(const char* s) { return parse_rational(s); }

ConeElement diag(std::vector<double> xi) { return ConeElement::from_spectrum(Field::Real, xi); }

ExactBetaParams exact(const Rational& mu, const Rational& nu, const ConeStructure& c) {
  return ExactBetaParams::make(mu, nu, minimal_extension_level(nu, c), c);
}

struct Moment {
  double mean, se;
};

Moment sample_moment(const std::vector<ConeElement>& xs, const Partition& lam, const ConeStructure& c) {
  double alpha = c.alpha_value();
  double s = 0, s2 = 0;
  for (const auto& x : xs) {
    double v = jack_eval(lam, alpha, x.eigenvalues());
    s += v;
    s2 += v * v;
  }
  double n = static_cast<double>(xs.size());
  double mean = s / n;
  return {mean, std::sqrt(std::max(s2 / n - mean * mean, 0.0) / n)};
}

}  // namespace

TEST_CASE("beta density") {
  CHECK(beta_density(diag({0.3}), 1, 1, kR1) == doctest::Approx(1.0));
  CHECK(beta_density(diag({1.2}), 1, 1, kR1) == 0.0);
  CHECK(beta_density(diag({0.5, 1.5}), 2, 2, kR2) == 0.0);
  // B_Omega(2,2) = (2 pi)^{1/2} Gamma(2)^2 Gamma(3/2)^2 / (Gamma(4) Gamma(7/2))
  double b = std::sqrt(2 * std::numbers::pi) * std::tgamma(2) * std::tgamma(1.5) * std::tgamma(2) *
             std::tgamma(1.5) / (std::tgamma(4) * std::tgamma(3.5));
  double v = beta_density(diag({0.5, 0.5}), 2, 2, kR2);
  CHECK(v == doctest::Approx(0.25 / b).epsilon(1e-12));
  // q=1: classical Beta(2.5, 0.7) density
  double x = 0.37;
  double classical = std::pow(x, 1.5) * std::pow(1 - x, -0.3) * std::tgamma(3.2) / (std::tgamma(2.5) * std::tgamma(0.7));
  CHECK(beta_density(diag({x}), 2.5, 0.7, kR1) ==
        doctest::Approx(classical).epsilon(1e-12));
  CHECK_THROWS_AS(beta_density(ConeElement::identity(Field::Real, 2), 0.5, 2, kR2), std::invalid_argument);
}

TEST_CASE("Wishart sampler against Gamma moments") {
  // q=1: W ~ Gamma(mu, 1), E W^m = (mu)_m
  std::mt19937_64 rng(11);
  const double mu = 2.5;
  const int n = 200000;
  double m1 = 0, m2 = 0, m1sq = 0, m2sq = 0;
  for (int i = 0; i < n; ++i) {
    double w = sample_wishart(WishartFactor::bartlett(mu), kR1, rng)(0, 0).real();
    m1 += w;
    m2 += w * w;
    m1sq += w * w;
    m2sq += w * w * w * w;
  }
  m1 /= n;
  m2 /= n;
  double se1 = std::sqrt((m1sq / n - m1 * m1) / n), se2 = std::sqrt((m2sq / n - m2 * m2) / n);
  CHECK(std::abs(m1 - mu) < 3 * se1);
  CHECK(std::abs(m2 - mu * (mu + 1)) < 3 * se2);
}

TEST_CASE("Wishart sampler moment identity on the cone") {
  for (auto c : {kR2, kC2}) {
    const double mu = c.mu0_value() + 1.75;
    std::mt19937_64 rng(5);
    std::vector<ConeElement> ws;
    for (int i = 0; i < 100000; ++i) ws.emplace_back(c.field, sample_wishart(WishartFactor::bartlett(mu), c, rng));
    for (int k = 1; k <= 3; ++k)
      for (const auto& lam : enumerate_partitions(k, c.q)) {
        double want = (pochhammer_gen(Complex(mu), lam, c) * to_double(zlambda_at_identity(lam, c))).real();
        auto got = sample_moment(ws, lam, c);
        CHECK_MESSAGE(std::abs(got.mean - want) < 3 * got.se, "d=", c.d, " lambda=", lam);
      }
  }
}

TEST_CASE("beta sampler moments match the moment functional") {
  auto uni = sample_beta(1, 1, kR1, 100000, 3);
  auto m = sample_moment(uni, Partition{1}, kR1);
  CHECK(std::abs(m.mean - 0.5) < 3 * m.se);

  auto b21 = sample_beta(2, 1, kR1, 100000, 4);
  m = sample_moment(b21, Partition{1}, kR1);
  CHECK(std::abs(m.mean - 2.0 / 3.0) < 3 * m.se);

  for (auto c : {kR1, kR2, kC2}) {
    const double mu = c.mu0_value() + 2, nu = c.mu0_value() + 0.75;
    auto xs = sample_beta(mu, nu, c, 100000, 21);
    for (const auto& x : xs) REQUIRE(in_omega_bar(x));
    for (const auto& lam : enumerate_partitions_upto(4, c.q)) {
      double want = moment_value(lam, BetaParams::make(mu, nu, 0, c), c).real();
      auto got = sample_moment(xs, lam, c);
      CHECK_MESSAGE(std::abs(got.mean - want) <= 3 * got.se + 1e-15, "d=", c.d, " lambda=", lam);
    }
  }
}

TEST_CASE("group-case sampler") {
  auto ident = sample_beta_singular(4, 0, kR2, 200, 9);
  for (const auto& x : ident) CHECK((x.matrix() - SmallMat::identity(2)).frobenius() == 0.0);

  // p=5, pt=3 at d=1: mu = 5/2, nu = 3/2 both above mu0 = 1/2
  auto xs = sample_beta_singular(5, 3, kR2, 100000, 10);
  for (const auto& lam : enumerate_partitions_upto(3, 2)) {
    double want = to_double(moment_value(lam, exact(R("5/2"), R("3/2"), kR2), kR2));
    auto got = sample_moment(xs, lam, kR2);
    CHECK_MESSAGE(std::abs(got.mean - want) <= 3 * got.se + 1e-15, "lambda=", lam);
  }

  auto s = BetaSampler::for_parameters(2.5, 0.5, kR2);
  CHECK(s.describe() == "bartlett(2.5)+gram(1)");
  CHECK(s.nu() == doctest::Approx(0.5));
  CHECK_THROWS_AS(BetaSampler::for_parameters(2.5, 0.25, kR2), std::invalid_argument);
  CHECK_THROWS_AS(BetaSampler::group_case(1, 2, kR2), std::invalid_argument);
}

TEST_CASE("sample streams do not depend on the worker count") {
  auto a = sample_beta(3, 3, kC2, 10000, 77, 1);
  auto b = sample_beta(3, 3, kC2, 10000, 77, 6);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE((a[i].matrix() - b[i].matrix()).frobenius() == 0.0);
}

TEST_CASE("moment functional values") {
  for (auto c : {kR1, kR2, kC2, kR3, kC3}) {
    MomentFunctional L(exact(R("7/2"), R("5/3"), c), c);
    CHECK(L.value(Partition{}) == 1);
    for (const auto& lam : enumerate_partitions_upto(5, c.q)) {
      Rational want = pochhammer_gen(R("7/2"), lam, c) * zlambda_at_identity(lam, c) /
                      pochhammer_gen(R("7/2") + R("5/3"), lam, c);
      CHECK(L.value(lam) == want);
    }
  }
  // q=1: (mu)_m / (mu+nu)_m, mu = nu = 1 gives 1/(m+1)
  MomentFunctional U(exact(1, 1, kR1), kR1);
  for (int m = 0; m <= 8; ++m) CHECK(*U.monomial_value(Partition(std::vector<int>{m})) == Rational(1, m + 1));
  CHECK(moment_value(Partition{1}, exact(2, 1, kR1), kR1) == Rational(2, 3));
}

TEST_CASE("moment functional is linear and consistent across bases") {
  for (auto c : {kR2, kC2, kR3}) {
    MomentFunctional L(exact(R("9/2"), R("-1/3"), c), c);
    for (int k = 0; k <= 5; ++k) {
      // (tr x)^k = sum of C_lambda over |lambda| = k
      SymPolynomial<Rational> tr = SymPolynomial<Rational>::constant(1, c.q);
      for (int i = 0; i < k; ++i) tr = sym_multiply(tr, SymPolynomial<Rational>::monomial(Partition{1}, c.q));
      Rational sum = 0;
      for (const auto& lam : enumerate_partitions(k, c.q)) sum += L.value(lam);
      CHECK(L.apply(tr) == sum);
      CHECK(moment_of_polynomial(tr, L.params(), c) == sum);
      auto jack = basis_convert(tr, Basis::Jack, L.table());
      CHECK(L.apply(jack) == sum);
    }
  }
}

TEST_CASE("nu = 0 is evaluation at e") {
  for (auto c : {kR1, kR2, kC2, kR3}) {
    MomentFunctional L(exact(R("11/2"), 0, c), c);
    for (const auto& kappa : enumerate_partitions_upto(6, c.q))
      CHECK(*L.monomial_value(kappa) == Rational(monomial_count(kappa, c.q)));
    auto m = moment_matrix(3, Localizer::One, L);
    auto a = analyze_psd(m);
    CHECK(a.psd);
    CHECK(a.rank == 1);
    CHECK(a.min_eigenvalue >= -1e-12);
  }
}

TEST_CASE("pole markers") {
  // mu + nu = -1 at q=1: (mu+nu)_m vanishes from m = 2 on
  MomentFunctional L(ExactBetaParams::make(2, -3, 4, kR1), kR1);
  CHECK(L.jack_value(Partition{1}).has_value());
  CHECK_FALSE(L.jack_value(Partition{2}).has_value());
  CHECK_FALSE(L.monomial_value(Partition{3}).has_value());
  CHECK_THROWS_AS(L.value(Partition{2}), MomentPole);
  CHECK_THROWS_AS(moment_value(Partition{2}, L.params(), kR1), MomentPole);
  CHECK_THROWS_AS(moment_matrix(1, Localizer::One, L), MomentPole);
  try {
    L.value(Partition{5});
  } catch (const MomentPole& e) {
    CHECK(e.partition() == Partition{5});
  }
}

TEST_CASE("moment matrices") {
  MomentFunctional U(exact(1, 1, kR1), kR1);
  auto h = moment_matrix(2, Localizer::One, U);
  REQUIRE(h.size() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(h.at(i, j) == Rational(1, i + j + 1));
  CHECK(analyze_psd(h).psd);
  CHECK(analyze_psd(h).rank == 3);

  MomentFunctional L(exact(12, R("1/2"), kR2), kR2);
  for (auto loc : {Localizer::One, Localizer::DetX, Localizer::DetEminusX}) {
    auto m = moment_matrix(3, loc, L);
    CHECK(m.size() == static_cast<int>(enumerate_partitions_upto(3, 2).size()));
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < m.size(); ++j) CHECK(m.at(i, j) == m.at(j, i));
  }
  // det_x localizer entries: L(x_1 x_2 m_kappa m_lambda)
  auto m = moment_matrix(1, Localizer::DetX, L);
  CHECK(m.at(0, 0) == *L.monomial_value(Partition{1, 1}));
  CHECK(parse_localizer("det_e_minus_x") == Localizer::DetEminusX);
  CHECK_THROWS_AS(parse_localizer("det"), std::invalid_argument);

  auto e = localizer_polynomial(Localizer::DetEminusX, 3);
  std::vector<Rational> pt{R("1/3"), R("2/5"), R("-1")};
  CHECK(sym_eval<Rational>(e, pt, nullptr) == (1 - pt[0]) * (1 - pt[1]) * (1 - pt[2]));
}

TEST_CASE("exact PSD analysis") {
  auto make = [](std::vector<int> v, int n) {
    MomentMatrix m;
    for (int i = 0; i < n; ++i) m.index.push_back(Partition(std::vector<int>{i}));
    for (int x : v) m.entries.emplace_back(x);
    return m;
  };
  auto a = analyze_psd(make({1, 2, 2, 1}, 2));
  CHECK_FALSE(a.psd);
  CHECK(a.witness_value < 0);
  CHECK(a.min_eigenvalue == doctest::Approx(-1.0));

  a = analyze_psd(make({0, 1, 1, 0}, 2));
  CHECK_FALSE(a.psd);
  CHECK(a.witness_value < 0);

  a = analyze_psd(make({1, 1, 1, 1}, 2));
  CHECK(a.psd);
  CHECK(a.rank == 1);

  a = analyze_psd(make({0, 0, 0, 0, 2, 1, 0, 1, 3}, 3));
  CHECK(a.psd);
  CHECK(a.rank == 2);

  a = analyze_psd(make({4, 2, 2, 1}, 2));
  CHECK(a.psd);
  CHECK(a.rank == 1);
}

TEST_CASE("Wallach points give PSD localized matrices") {
  struct Case {
    ConeStructure c;
    Rational mu, nu;
  };
  std::vector<Case> cases{{kR2, 12, 0},       {kR2, 12, R("1/2")}, {kR2, 12, 1},
                          {kC2, 14, 0},       {kC2, 14, 1},        {kC2, 14, 3},
                          {kR1, 5, R("3/2")}, {kC3, 14, 1},        {kC3, 14, 0}};
  for (const auto& cs : cases) {
    REQUIRE(wallach_contains(cs.nu, cs.c));
    int dmax = cs.c.q == 3 ? 4 : 6;
    MomentFunctional L(exact(cs.mu, cs.nu, cs.c), cs.c, moment_caps(dmax, cs.c.q));
    for (auto loc : {Localizer::One, Localizer::DetX, Localizer::DetEminusX}) {
      auto a = analyze_psd(moment_matrix(dmax, loc, L));
      CHECK_MESSAGE(a.psd, "nu=", cs.nu, " loc=", localizer_name(loc));
      CHECK(a.min_eigenvalue >= -1e-12);
    }
  }
}

TEST_CASE("classifier finds witnesses outside the Wallach set") {
  auto v = positivity_classify(12, R("1/4"), kR2, 8);
  REQUIRE(v.conclusive());
  CHECK(v.witness->value < 0);
  // The witness is a genuine certificate: recompute p^T M p from scratch.
  MomentFunctional L(exact(12, R("1/4"), kR2), kR2, moment_caps(8, 2));
  auto m = moment_matrix(v.witness->degree, v.witness->localizer, L);
  Rational q = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) q += v.witness->vector[i] * m.at(i, j) * v.witness->vector[j];
  CHECK(q == v.witness->value);

  v = positivity_classify(12, R("-1/4"), kR2, 8);
  CHECK(v.conclusive());
  CHECK(v.k == 1);

  v = positivity_classify(14, R("1/2"), kC2, 8);
  CHECK(v.conclusive());

  v = positivity_classify(12, R("1/2"), kR2, 4);
  CHECK_FALSE(v.conclusive());
  CHECK(v.dmax == 4);

  CHECK_THROWS_AS(positivity_classify(3, R("1/4"), kR2, 4), std::invalid_argument);
}

TEST_CASE("rank-1 extension") {
  struct Case {
    Rational mu, nu;
    int k;
  };
  std::vector<Case> cases{{3, R("-1/2"), 1}, {R("9/2"), R("-3/2"), 2}, {R("7/3"), R("1/5"), 0},
                          {6, R("-5/2"), 3}, {3, R("1/2"), 1},         {R("5/2"), 2, 2}};
  for (const auto& cs : cases) {
    for (int m = 0; m <= 8; ++m) {
      std::vector<Rational> coeffs(m + 1, Rational(0));
      coeffs[m] = 1;
      Rational want = pochhammer_gen(cs.mu, Partition(std::vector<int>{m}), kR1) /
                      pochhammer_gen(Rational(cs.mu + cs.nu), Partition(std::vector<int>{m}), kR1);
      CHECK(dist_ext_rank1_exact(coeffs, cs.mu, cs.nu, cs.k) == want);
      std::vector<double> fc(m + 1, 0.0);
      fc[m] = 1;
      CHECK(dist_ext_rank1(fc, to_double(cs.mu), to_double(cs.nu), cs.k) ==
            doctest::Approx(to_double(want)).epsilon(1e-12));
    }
  }
  CHECK(dist_ext_rank1_exact({1}, 3, R("1/2"), 1) == 1);
  CHECK(dist_ext_rank1_exact({0, 1}, 3, R("1/2"), 1) == Rational(6, 7));
  CHECK_THROWS_AS(dist_ext_rank1_exact({1}, 1, R("1/2"), 1), std::invalid_argument);
  CHECK_THROWS_AS(dist_ext_rank1_exact({1}, 3, R("-1"), 1), std::invalid_argument);
}

TEST_CASE("rank-1 extension at k=0 against quadrature") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  std::vector<double> coeffs{1, 2, 0, -1, 0.5};
  for (auto [mu, nu] : {std::pair{2.5, 0.7}, {1.3, 3.1}, {4.0, 0.4}}) {
    // xc is the signed distance to the nearer endpoint
    auto f = [&](double x, double xc) {
      double one_minus_x = xc > 0 ? xc : 1 - x;
      double p = 0, pw = 1;
      for (double c : coeffs) {
        p += c * pw;
        pw *= x;
      }
      return p * std::pow(x, mu - 1) * std::pow(one_minus_x, nu - 1);
    };
    double integral = integrator.integrate(f, 0.0, 1.0);
    double b = std::exp(std::lgamma(mu) + std::lgamma(nu) - std::lgamma(mu + nu));
    CHECK(dist_ext_rank1(coeffs, mu, nu, 0) == doctest::Approx(integral / b).epsilon(1e-10));
  }
}

TEST_CASE("product relation") {
  for (auto c : {kR1, kR2, kC2}) {
    for (const Rational& nu : {Rational(2), c.half_d(), R("7/4")}) {
      auto rep = product_relation_check(3, nu, c, 4);
      CHECK(rep.max_discrepancy == 0);
      CHECK(rep.polynomials == static_cast<int>(enumerate_partitions_upto(4, c.q).size()));
    }
  }
  auto one = product_relation_check(3, R("1/2"), kR1, 0);
  CHECK(one.factor == Rational(1, 7));
  CHECK(one.lhs.front().second == Rational(1, 7));
  // nu = d/2 on a rank-2 cone makes c = 0 and the left side vanishes identically
  auto zero = product_relation_check(5, R("1/2"), kR2, 3);
  CHECK(zero.factor == 0);
  for (const auto& [p, v] : zero.lhs) CHECK(v == 0);
}
