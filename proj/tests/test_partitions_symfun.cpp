#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcone/partition.hpp"
#include "jcone/symfun.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace jcone;

namespace {

// Brute-force partition count: weakly decreasing tuples of length q.
int brute_count(int k, int q) {
  std::vector<int> v(q, 0);
  int count = 0;
  std::function<void(int, int, int)> rec = [&](int pos, int cap, int left) {
    if (pos == q) {
      if (left == 0) ++count;
      return;
    }
    for (int a = std::min(cap, left); a >= 0; --a) rec(pos + 1, a, left - a);
  };
  rec(0, k, k);
  return count;
}

Rational R(long a, long b = 1) { return Rational(a) / Rational(b); }

// Number of standard Young tableaux by the hook length formula.
long syt_count(const Partition& lam) {
  Partition conj = lam.conjugate();
  double f = std::tgamma(lam.weight() + 1.0);
  for (int i = 0; i < lam.length(); ++i)
    for (int j = 0; j < lam[i]; ++j) f /= (lam[i] - j - 1) + (conj[j] - i - 1) + 1;
  return std::lround(f);
}

// Schur polynomial by the bialternant formula det(x_i^{l_j + q - j}) / det(x_i^{q - j}).
double schur(const Partition& lam, const std::vector<double>& x) {
  int q = static_cast<int>(x.size());
  auto det = [&](auto entry) {
    std::vector<int> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0;
    do {
      int inv = 0;
      for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b)
          if (perm[a] > perm[b]) ++inv;
      double term = inv % 2 ? -1.0 : 1.0;
      for (int a = 0; a < q; ++a) term *= entry(a, perm[a]);
      total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
  };
  double num = det([&](int i, int j) { return std::pow(x[i], lam[j] + q - 1 - j); });
  double den = det([&](int i, int j) { return std::pow(x[i], q - 1 - j); });
  return num / den;
}

}  // namespace

TEST_CASE("enumerate_partitions listings") {
  auto p = enumerate_partitions(4, 2);
  REQUIRE(p.size() == 3);
  CHECK(p[0] == Partition{4});
  CHECK(p[1] == Partition{3, 1});
  CHECK(p[2] == Partition{2, 2});
  auto e = enumerate_partitions(0, 3);
  REQUIRE(e.size() == 1);
  CHECK(e[0].empty());
  for (int k = 0; k <= 12; ++k)
    for (int q = 1; q <= 4; ++q) CHECK(enumerate_partitions(k, q).size() == static_cast<std::size_t>(brute_count(k, q)));
  CHECK(enumerate_partitions(6, 3).size() == 7);
}

TEST_CASE("partition validation and conjugate") {
  CHECK_THROWS_AS(Partition({1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({-1}), std::invalid_argument);
  CHECK(Partition({2, 1, 0, 0}).length() == 2);
  CHECK(Partition({3, 1}).conjugate() == Partition({2, 1, 1}));
  CHECK(Partition({2, 2}).dominated_by(Partition{3, 1}));
  CHECK_FALSE(Partition({3, 1}).dominated_by(Partition{2, 2}));
  CHECK(monomial_count(Partition{2, 1}, 3) == 6);
}

TEST_CASE("jack_expand_monomial small cases") {
  auto c1 = jack_expand_monomial(Partition{1}, R(2), 2);
  REQUIRE(c1.coeffs.size() == 1);
  CHECK(c1.coeffs.at(Partition{1}) == 1);

  auto x5 = jack_expand_monomial(Partition{5}, R(2, 3), 1);
  REQUIRE(x5.coeffs.size() == 1);
  CHECK(x5.coeffs.at(Partition{5}) == 1);

  // Hand solution: C_(2) = m_2 + 2/(1+a) m_11, C_(1,1) = 2a/(1+a) m_11.
  for (Rational a : {R(2), R(1), R(2, 3)}) {
    auto c2 = jack_expand_monomial(Partition{2}, a, 2);
    auto c11 = jack_expand_monomial(Partition{1, 1}, a, 2);
    CHECK(c2.coeffs.at(Partition{2}) == 1);
    CHECK(c2.coeffs.at(Partition{1, 1}) == Rational(2) / (1 + a));
    CHECK(c11.coeffs.count(Partition{2}) == 0);
    CHECK(c11.coeffs.at(Partition{1, 1}) == 2 * a / (1 + a));
  }
}

TEST_CASE("alpha = 1 agrees with f^lambda times Schur") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 1.5);
  for (int q = 1; q <= 3; ++q) {
    for (int k = 0; k <= 7; ++k) {
      for (const auto& lam : enumerate_partitions(k, q)) {
        std::vector<double> x(q);
        for (auto& v : x) v = u(rng);
        double expect = static_cast<double>(syt_count(lam)) * schur(lam, x);
        double got = jack_eval(lam, 1.0, x);
        CHECK(got == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sum rule exact for k <= 8, q <= 3") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  for (Rational a : {R(2), R(1), R(2, 3)}) {
    for (int q = 1; q <= 3; ++q) {
      auto table = jack_table(a, q);
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<Rational> xi(q);
        for (auto& v : xi) v = R(num(rng), den(rng));
        Rational s = 0;
        for (auto& v : xi) s += v;
        Rational pw = 1;
        for (int k = 0; k <= 8; ++k) {
          Rational total = 0;
          for (const auto& lam : enumerate_partitions(k, q)) total += jack_eval(lam, *table, xi);
          CHECK(total == pw);
          pw *= s;
        }
      }
    }
  }
}

TEST_CASE("sum rule in floating point") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double a : {2.0, 1.0, 2.0 / 3.0}) {
    for (int q = 1; q <= 3; ++q) {
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xi(q);
        for (auto& v : xi) v = u(rng);
        double s = std::accumulate(xi.begin(), xi.end(), 0.0);
        for (int k = 0; k <= 8; ++k) {
          double total = 0, scale = 0;
          for (const auto& lam : enumerate_partitions(k, q)) {
            double v = jack_eval(lam, a, xi);
            total += v;
            scale += std::abs(v);
          }
          CHECK(std::abs(total - std::pow(s, k)) <= 1e-10 * std::max(1.0, scale));
        }
      }
    }
  }
}

TEST_CASE("dominance triangularity and nonnegativity") {
  for (Rational a : {R(2), R(1), R(2, 3)}) {
    for (int q = 1; q <= 3; ++q) {
      for (int k = 0; k <= 8; ++k) {
        for (const auto& lam : enumerate_partitions(k, q)) {
          auto c = jack_expand_monomial(lam, a, q);
          for (const auto& [kappa, v] : c.coeffs) {
            CHECK(kappa.dominated_by(lam));
            CHECK(v > 0);
          }
        }
      }
    }
  }
}

TEST_CASE("jack_eval matches expansion evaluation") {
  auto table = jack_table(R(2), 2);
  auto c21 = jack_expand_monomial(Partition{2, 1}, *table);
  std::vector<Rational> ones{1, 1};
  Rational via_expansion = sym_eval<Rational>(c21, ones, nullptr);
  CHECK(jack_eval(Partition{2, 1}, *table, ones) == via_expansion);
  CHECK(jack_at_ones(Partition{2, 1}, *table) == via_expansion);
  CHECK(jack_eval(Partition{1}, 2.0, std::vector<double>{1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("caps are enforced") {
  SymCaps caps{4, 2};
  CHECK_THROWS_AS(JackTable<Rational>(R(1), 3, caps), CapExceeded);
  JackTable<Rational> t(R(1), 2, caps);
  CHECK_THROWS_AS(t.block(5), CapExceeded);
}

TEST_CASE("sym_multiply") {
  auto m1 = SymPolynomial<Rational>::monomial(Partition{1}, 2);
  auto sq = sym_multiply(m1, m1);
  CHECK(sq.coeffs.size() == 2);
  CHECK(sq.coeffs.at(Partition{2}) == 1);
  CHECK(sq.coeffs.at(Partition{1, 1}) == 2);
  auto one = SymPolynomial<Rational>::constant(1, 2);
  CHECK(sym_multiply(sq, one).coeffs == sq.coeffs);

  auto jack_basis = SymPolynomial<Rational>{Basis::Jack, R(2), 2, {}};
  CHECK_THROWS_AS(sym_multiply(jack_basis, m1), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-5, 5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int q = 1; q <= 3; ++q) {
    for (int trial = 0; trial < 10; ++trial) {
      SymPolynomial<double> p, r;
      p.rank = r.rank = q;
      for (const auto& part : enumerate_partitions_upto(3, q)) {
        p.add(part, c(rng));
        r.add(part, c(rng));
      }
      auto pr = sym_multiply(p, r);
      for (int pt = 0; pt < 20; ++pt) {
        std::vector<double> x(q);
        for (auto& v : x) v = u(rng);
        double lhs = sym_eval<double>(pr, x, nullptr);
        double rhs = sym_eval<double>(p, x, nullptr) * sym_eval<double>(r, x, nullptr);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("basis_convert") {
  auto table = jack_table(R(2), 2);
  auto m1 = SymPolynomial<Rational>::monomial(Partition{1}, 2);
  auto j1 = basis_convert(m1, Basis::Jack, *table);
  CHECK(j1.coeffs.at(Partition{1}) == 1);
  CHECK(basis_convert(j1, Basis::MonomialSymmetric, *table).coeffs == m1.coeffs);

  // (x1 + x2)^k has coefficient 1 on every C_lambda of weight k.
  auto pk = SymPolynomial<Rational>::constant(1, 2);
  for (int k = 1; k <= 6; ++k) {
    pk = sym_multiply(pk, m1);
    auto jk = basis_convert(pk, Basis::Jack, *table);
    CHECK(jk.coeffs.size() == enumerate_partitions(k, 2).size());
    for (const auto& [lam, v] : jk.coeffs) CHECK(v == 1);
  }

  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> c(-7, 7);
  for (int q = 1; q <= 3; ++q) {
    for (Rational a : {R(2), R(1), R(2, 3)}) {
      auto t = jack_table(a, q);
      SymPolynomial<Rational> p;
      p.rank = q;
      for (const auto& part : enumerate_partitions_upto(4, q)) p.add(part, R(c(rng), 3));
      auto back = basis_convert(basis_convert(p, Basis::Jack, *t), Basis::MonomialSymmetric, *t);
      CHECK(back.coeffs == p.coeffs);
      std::vector<Rational> x(q);
      for (int i = 0; i < q; ++i) x[i] = R(i + 2, 5);
      auto pj = basis_convert(p, Basis::Jack, *t);
      CHECK(sym_eval<Rational>(pj, x, t.get()) == sym_eval<Rational>(p, x, nullptr));
    }
  }
}

TEST_CASE("elementary symmetric") {
  auto e2 = elementary<Rational>(2, 3);
  std::vector<Rational> x{R(1), R(2), R(3)};
  CHECK(sym_eval<Rational>(e2, x, nullptr) == 11);
  CHECK(elementary<Rational>(4, 3).is_zero());
}
