#include "jcone/bessel.hpp"

#include "jcone/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jcone {

void TruncationControl::validate() const {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be >= 1");
  if (!(rel_tol > 0)) throw std::invalid_argument("rel_tol must be > 0");
  if (stagnation_window < 1) throw std::invalid_argument("stagnation_window must be >= 1");
}

namespace {

// Below this fraction of the largest block, further blocks are rounding noise.
constexpr double kNoiseFloor = 1e-17;

struct Kahan {
  std::complex<long double> sum = 0.0L;
  std::complex<long double> carry = 0.0L;
  void add(std::complex<long double> v) {
    std::complex<long double> y = v - carry;
    std::complex<long double> t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

BesselSeries::BesselSeries(Complex mu, const ConeStructure& cone, TruncationControl ctl)
    : mu_(mu), cone_(cone), ctl_(ctl) {
  ctl_.validate();
  SymCaps caps{std::max(ctl_.max_degree, SymCaps{}.max_degree), std::max(cone.q, SymCaps{}.max_rank)};
  auto table = jack_table<Wide>(static_cast<Wide>(cone.alpha_value()), cone.q, caps);
  Wide inv_fact = 1.0L;
  for (int k = 0; k <= ctl_.max_degree; ++k) {
    if (k > 0) inv_fact /= k;
    const auto& b = table->block(k);
    DegreeBlock blk;
    blk.perms = b.perms;
    blk.coeff.assign(b.parts.size(), 0.0L);
    bool zero_here = false;
    for (std::size_t i = 0; i < b.parts.size(); ++i) {
      WideComplex poch = 1.0L;
      const Partition& lam = b.parts[i];
      for (int r = 0; r < lam.length(); ++r) {
        WideComplex base = WideComplex(mu) - static_cast<Wide>(0.5L * cone.d * r);
        for (int t = 0; t < lam[r]; ++t) poch *= base + static_cast<Wide>(t);
      }
      if (poch == WideComplex(0.0L)) {
        if (!first_zero_) first_zero_ = lam;
        zero_here = true;
        continue;
      }
      WideComplex a = (k % 2 ? -inv_fact : inv_fact) / poch;
      for (std::size_t j = i; j < b.parts.size(); ++j) {
        Wide c = b.at(static_cast<int>(i), static_cast<int>(j));
        if (c != 0.0L) blk.coeff[j] += a * c;
      }
    }
    blocks_.push_back(std::move(blk));
    if (zero_here) break;
  }
}

Complex BesselSeries::block(int k, std::span<const double> xi) const {
  WideComplex v = wide_block(k, xi);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

BesselSeries::WideComplex BesselSeries::wide_block(int k, std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != cone_.q) throw std::invalid_argument("spectrum length must equal rank");
  if (first_zero_ && k >= first_zero_->weight()) {
    std::ostringstream os;
    os << "generalized Pochhammer (mu)_lambda vanishes at lambda = " << *first_zero_;
    throw ZeroPochhammer(os.str(), *first_zero_);
  }
  const DegreeBlock& blk = blocks_.at(k);
  std::vector<std::vector<Wide>> pw(xi.size(), std::vector<Wide>(k + 1, 1.0L));
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (int e = 1; e <= k; ++e) pw[i][e] = pw[i][e - 1] * static_cast<Wide>(xi[i]);
  Kahan acc;
  for (std::size_t p = 0; p < blk.coeff.size(); ++p) {
    Wide m = 0;
    for (const auto& e : blk.perms[p]) {
      Wide t = 1;
      for (std::size_t i = 0; i < e.size(); ++i) t *= pw[i][e[i]];
      m += t;
    }
    acc.add(blk.coeff[p] * m);
  }
  return acc.sum;
}

BesselValue BesselSeries::sum(std::span<const double> xi, bool negative) const {
  Kahan total;
  double peak = 0;
  int run = 0;
  double last = 0;
  for (int k = 0; k <= ctl_.max_degree; ++k) {
    WideComplex blk = wide_block(k, xi);
    if (negative && k % 2) blk = -blk;
    total.add(blk);
    last = static_cast<double>(std::abs(blk));
    peak = std::max(peak, last);
    double threshold = std::max(ctl_.rel_tol * static_cast<double>(std::abs(total.sum)), kNoiseFloor * peak);
    run = last < threshold ? run + 1 : 0;
    if (run >= ctl_.stagnation_window)
      return {Complex(static_cast<double>(total.sum.real()), static_cast<double>(total.sum.imag())), k, last};
  }
  std::ostringstream os;
  os << "Bessel series did not converge by degree " << ctl_.max_degree << "; last block magnitude " << last;
  throw NonConvergence(os.str(), last);
}

BesselValue BesselSeries::evaluate(std::span<const double> xi) const { return sum(xi, false); }

BesselValue BesselSeries::evaluate_negative(std::span<const double> r) const {
  if (mu_.imag() != 0 || !(mu_.real() > cone_.mu0_value()))
    throw std::invalid_argument("evaluate_negative requires real mu > mu0");
  std::vector<double> clamped(r.begin(), r.end());
  for (double& v : clamped) {
    if (v < -1e-12) throw std::domain_error("evaluate_negative requires r in the closed cone");
    v = std::max(v, 0.0);
  }
  // J_mu(-r) has degree blocks (-1)^k block_k(r); all of them are >= 0.
  BesselValue out = sum(clamped, true);
  out.value = out.value.real();
  return out;
}

BesselValue bessel_eval(Complex mu, const ConeElement& x, const ConeStructure& cone, TruncationControl ctl) {
  if (x.rank() != cone.q) throw std::invalid_argument("matrix rank does not match cone");
  return BesselSeries(mu, cone, ctl).evaluate(x.eigenvalues());
}

BesselValue bessel_at_neg(double mu, const ConeElement& r, const ConeStructure& cone, TruncationControl ctl) {
  if (r.rank() != cone.q) throw std::invalid_argument("matrix rank does not match cone");
  if (!(mu > cone.mu0_value())) throw std::invalid_argument("bessel_at_neg requires mu > mu0");
  return BesselSeries(mu, cone, ctl).evaluate_negative(r.eigenvalues());
}

namespace {

struct MaxAcc {
  double max_abs = -1;
  std::vector<double> witness;
  std::uint64_t n = 0;
  void merge(const MaxAcc& o) {
    n += o.n;
    if (o.max_abs > max_abs) {
      max_abs = o.max_abs;
      witness = o.witness;
    }
  }
};

constexpr std::uint64_t kBoundStream = 0xB0;
constexpr std::uint64_t kBallStream = 0xBA;
constexpr std::uint64_t kGroupStream = 0x6A;

}  // namespace

BoundReport bound_check(double mu, const ConeStructure& cone, std::uint64_t samples, std::uint64_t seed,
                        TruncationControl ctl, double radius, BoundDomain domain, double slack, int jobs) {
  if (!(mu >= cone.mu0_value() + 0.5 - 1e-12)) throw std::invalid_argument("bound_check requires mu >= mu0 + 1/2");
  BesselSeries series(mu, cone, ctl);
  double lo = domain == BoundDomain::Symmetric ? -radius : 0.0;
  ChunkPlan plan{samples, 1024};
  auto acc = run_chunks<MaxAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kBoundStream, c);
    std::uniform_real_distribution<double> u(lo, radius);
    MaxAcc a;
    for (std::uint64_t s = 0; s < count; ++s) {
      std::vector<double> xi(cone.q);
      for (auto& v : xi) v = u(rng);
      auto x = ConeElement::from_spectrum(cone.field, xi).conjugated(haar_group(cone.field, cone.q, rng));
      double v = std::abs(series.evaluate(x.eigenvalues()).value);
      if (v > a.max_abs) {
        a.max_abs = v;
        a.witness = x.eigenvalues();
      }
    }
    a.n = count;
    return a;
  });
  double q_fact = 1;
  for (int i = 2; i <= cone.q; ++i) q_fact *= i;
  BoundReport rep;
  rep.bound = std::sqrt(std::pow(2.0, cone.q) * q_fact);
  rep.max_abs = std::max(acc.max_abs, 0.0);
  rep.witness = acc.witness;
  rep.samples = acc.n;
  rep.violated = rep.max_abs > rep.bound + slack;
  return rep;
}

namespace {

// Sums of y = (a_re, a_im, w_re, w_im) and of all products y_i y_j.
struct RatioAcc {
  std::uint64_t n = 0;
  std::uint64_t attempts = 0;
  double s[4] = {0, 0, 0, 0};
  double ss[4][4] = {};
  void add(const double y[4]) {
    ++n;
    for (int i = 0; i < 4; ++i) {
      s[i] += y[i];
      for (int j = 0; j < 4; ++j) ss[i][j] += y[i] * y[j];
    }
  }
  void merge(const RatioAcc& o) {
    n += o.n;
    attempts += o.attempts;
    for (int i = 0; i < 4; ++i) {
      s[i] += o.s[i];
      for (int j = 0; j < 4; ++j) ss[i][j] += o.ss[i][j];
    }
  }
};

bool positive_definite(const SmallMat& m) {
  // Sylvester's criterion on leading principal minors (m is Hermitian).
  const int n = m.size();
  if (m(0, 0).real() <= 0) return false;
  if (n >= 2 && (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real() <= 0) return false;
  if (n == 3 && determinant(m).real() <= 0) return false;
  return true;
}

}  // namespace

McEstimate laplace_ball_mc(Complex mu, const ConeElement& x, const ConeStructure& cone, std::uint64_t samples,
                           std::uint64_t seed, int jobs) {
  const int q = cone.q;
  if (x.rank() != q) throw std::invalid_argument("matrix rank does not match cone");
  const double shift = 1.0 + cone.d * (q - 0.5);
  if (!(mu.real() > shift - 1.0)) throw std::invalid_argument("laplace_ball_mc requires Re mu > d (q - 1/2)");
  const Complex expo = mu - shift;
  const SmallMat& xm = x.matrix();
  ChunkPlan plan{samples, 4096};
  auto acc = run_chunks<RatioAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kBallStream, c);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RatioAcc a;
    const std::uint64_t limit = count * 10000 + 100000;
    SmallMat v(q);
    while (a.n < count) {
      if (++a.attempts > limit) throw LowAcceptance("ball sampler acceptance rate below 1e-4");
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) v(i, j) = Complex(u(rng), cone.d == 2 ? u(rng) : 0.0);
      SmallMat rest = SmallMat::identity(q) - v.adjoint() * v;
      if (!positive_definite(rest)) continue;
      double det = determinant(rest).real();
      Complex w = std::exp(expo * std::log(det));
      Complex e = std::exp(Complex(0.0, -2.0 * real_inner(v, xm)));
      Complex aw = e * w;
      double y[4] = {aw.real(), aw.imag(), w.real(), w.imag()};
      a.add(y);
    }
    return a;
  });
  if (static_cast<double>(acc.n) < 1e-4 * static_cast<double>(acc.attempts))
    throw LowAcceptance("ball sampler acceptance rate below 1e-4");
  double n = static_cast<double>(acc.n);
  Complex abar(acc.s[0] / n, acc.s[1] / n), wbar(acc.s[2] / n, acc.s[3] / n);
  Complex ratio = abar / wbar;
  Complex p = 1.0 / wbar, s = ratio / wbar;
  double c_re[4] = {p.real(), -p.imag(), -s.real(), s.imag()};
  double c_im[4] = {p.imag(), p.real(), -s.imag(), -s.real()};
  auto quad = [&](const double c[4]) {
    double v = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v += c[i] * c[j] * acc.ss[i][j] / n;
    return std::sqrt(std::max(v, 0.0) / n);
  };
  McEstimate out;
  out.value = ratio;
  out.se_re = quad(c_re);
  out.se_im = quad(c_im);
  out.samples = acc.n;
  out.attempts = acc.attempts;
  return out;
}

McEstimate group_integral_mc(const SmallMat& x, const ConeStructure& cone, std::uint64_t samples, std::uint64_t seed,
                             int jobs) {
  if (x.size() != cone.q) throw std::invalid_argument("matrix size does not match cone");
  ChunkPlan plan{samples, 4096};
  auto acc = run_chunks<MeanAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kGroupStream, c);
    MeanAcc a(2);
    for (std::uint64_t s = 0; s < count; ++s) {
      SmallMat u = haar_group(cone.field, cone.q, rng);
      double phase = -2.0 * real_inner(u, x);
      a.add(0, std::cos(phase));
      a.add(1, std::sin(phase));
    }
    a.n = count;
    return a;
  });
  McEstimate out;
  out.value = Complex(acc.mean(0), acc.mean(1));
  out.se_re = acc.se(0);
  out.se_im = acc.se(1);
  out.samples = acc.n;
  out.attempts = acc.n;
  return out;
}

}  // namespace jcone
