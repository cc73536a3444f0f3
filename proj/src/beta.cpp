#include "jcone/beta.hpp"

#include "jcone/mc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace jcone {

// ---------------------------------------------------------------------------
// Density and samplers

double beta_density(const ConeElement& x, double mu, double nu, const ConeStructure& cone) {
  if (!(mu > cone.mu0_value()) || !(nu > cone.mu0_value()))
    throw std::invalid_argument("beta density needs mu, nu > mu0");
  if (x.rank() != cone.q) throw std::invalid_argument("matrix rank does not match cone");
  if (!in_omega_e(x)) return 0.0;
  double log_det = 0, log_det_c = 0;
  for (double v : x.eigenvalues()) {
    log_det += std::log(v);
    log_det_c += std::log1p(-v);
  }
  double nq = static_cast<double>(cone.n) / cone.q;
  double log_b = (lgamma_cone(mu, cone) + lgamma_cone(nu, cone) - lgamma_cone(mu + nu, cone)).real();
  return std::exp((mu - nq) * log_det + (nu - nq) * log_det_c - log_b);
}

double WishartFactor::parameter(const ConeStructure& cone) const {
  return kind == Kind::Bartlett ? shape : 0.5 * rows * cone.d;
}

SmallMat sample_wishart(const WishartFactor& f, const ConeStructure& cone, std::mt19937_64& rng) {
  const int q = cone.q;
  if (f.kind == WishartFactor::Kind::Gram) {
    if (f.rows == 0) return SmallMat(q);
    auto x = gaussian_block(cone.field, f.rows, q, 0.5, rng);
    return gram(x, f.rows, q);
  }
  SmallMat l(q);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (int i = 0; i < q; ++i) {
    std::gamma_distribution<double> gam(f.shape - 0.5 * cone.d * i, 1.0);
    l(i, i) = std::sqrt(gam(rng));
    for (int j = 0; j < i; ++j) {
      double re = g(rng);
      double im = cone.field == Field::Complex ? g(rng) : 0.0;
      l(i, j) = Complex(re, im);
    }
  }
  return l * l.adjoint();
}

BetaSampler::BetaSampler(WishartFactor first, WishartFactor second, const ConeStructure& cone)
    : first_(first), second_(second), cone_(cone) {
  auto check = [&](const WishartFactor& f, bool must_be_regular) {
    if (f.kind == WishartFactor::Kind::Bartlett) {
      if (!(f.shape > cone.mu0_value())) throw std::invalid_argument("Bartlett shape must exceed mu0");
    } else {
      if (f.rows < 0) throw std::invalid_argument("Gram factor needs rows >= 0");
      if (must_be_regular && f.rows < cone.q) throw std::invalid_argument("first Gram factor needs p >= q");
    }
  };
  check(first_, true);
  check(second_, false);
}

namespace {

WishartFactor factor_for(double param, const ConeStructure& cone, bool regular) {
  if (param > cone.mu0_value()) return WishartFactor::bartlett(param);
  double p = 2 * param / cone.d;
  double rp = std::nearbyint(p);
  if (std::abs(p - rp) <= 1e-12 && rp >= 0 && (!regular || rp >= cone.q)) return WishartFactor::gram(static_cast<int>(rp));
  std::ostringstream os;
  os << "parameter " << param << " is neither above mu0 = " << cone.mu0_value() << " nor a samplable lattice point";
  throw std::invalid_argument(os.str());
}

}  // namespace

BetaSampler BetaSampler::for_parameters(double mu, double nu, const ConeStructure& cone) {
  return {factor_for(mu, cone, true), factor_for(nu, cone, false), cone};
}

BetaSampler BetaSampler::group_case(int p, int pt, const ConeStructure& cone) {
  if (p < cone.q) throw std::invalid_argument("group case needs p >= q");
  if (pt < 0) throw std::invalid_argument("group case needs pt >= 0");
  return {WishartFactor::gram(p), WishartFactor::gram(pt), cone};
}

ConeElement BetaSampler::draw(std::mt19937_64& rng) const {
  SmallMat w1 = sample_wishart(first_, cone_, rng);
  if (second_.kind == WishartFactor::Kind::Gram && second_.rows == 0) return ConeElement::identity(cone_.field, cone_.q);
  SmallMat w2 = sample_wishart(second_, cone_, rng);
  ConeElement total(cone_.field, w1 + w2);
  ConeElement a = inv_sqrt_pd(total, ConeTolerance{0.0, 1e-12});
  return {cone_.field, a.matrix() * w1 * a.matrix()};
}

std::string BetaSampler::describe() const {
  auto one = [&](const WishartFactor& f) {
    std::ostringstream os;
    if (f.kind == WishartFactor::Kind::Bartlett)
      os << "bartlett(" << f.shape << ")";
    else
      os << "gram(" << f.rows << ")";
    return os.str();
  };
  return one(first_) + "+" + one(second_);
}

namespace {

constexpr std::uint64_t kSampleStream = 0x5A;

struct SampleAcc {
  std::vector<ConeElement> items;
  void merge(SampleAcc& o) {
    items.insert(items.end(), std::make_move_iterator(o.items.begin()), std::make_move_iterator(o.items.end()));
  }
};

}  // namespace

std::vector<ConeElement> sample_stream(const BetaSampler& sampler, std::uint64_t n, std::uint64_t seed, int jobs) {
  ChunkPlan plan{n, 4096};
  auto acc = run_chunks<SampleAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kSampleStream, c);
    SampleAcc a;
    a.items.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) a.items.push_back(sampler.draw(rng));
    return a;
  });
  return std::move(acc.items);
}

std::vector<ConeElement> sample_beta(double mu, double nu, const ConeStructure& cone, std::uint64_t n,
                                     std::uint64_t seed, int jobs) {
  if (!(mu > cone.mu0_value()) || !(nu > cone.mu0_value()))
    throw std::invalid_argument("sample_beta needs mu, nu > mu0");
  BetaSampler s(WishartFactor::bartlett(mu), WishartFactor::bartlett(nu), cone);
  return sample_stream(s, n, seed, jobs);
}

std::vector<ConeElement> sample_beta_singular(int p, int pt, const ConeStructure& cone, std::uint64_t n,
                                              std::uint64_t seed, int jobs) {
  return sample_stream(BetaSampler::group_case(p, pt, cone), n, seed, jobs);
}

// ---------------------------------------------------------------------------
// Exact moment functional

SymCaps moment_caps(int dmax, int q) {
  return {std::max(SymCaps{}.max_degree, 2 * dmax + q), std::max(SymCaps{}.max_rank, q)};
}

MomentFunctional::MomentFunctional(ExactBetaParams params, ConeStructure cone, SymCaps caps)
    : params_(std::move(params)), cone_(std::move(cone)), table_(jack_table(cone_.alpha, cone_.q, caps)) {}

void MomentFunctional::fill_degree(int k) const {
  {
    std::shared_lock lock(mutex_);
    if (jack_.count(k)) return;
  }
  const auto& b = table_->block(k);
  const int n = static_cast<int>(b.parts.size());
  Rational mu_nu = params_.mu + params_.nu;
  std::vector<std::optional<Rational>> jv(n);
  for (int i = 0; i < n; ++i) {
    Rational den = pochhammer_gen(mu_nu, b.parts[i], cone_);
    if (den == 0) continue;
    Rational z_e = 0;
    for (int j = i; j < n; ++j) z_e += b.at(i, j) * static_cast<long>(b.perms[j].size());
    jv[i] = pochhammer_gen(params_.mu, b.parts[i], cone_) * z_e / den;
  }
  // L(C_i) = sum_{j >= i} c_ij L(m_j): back substitution from the last row.
  std::vector<std::optional<Rational>> mv(n);
  for (int i = n - 1; i >= 0; --i) {
    if (!jv[i]) continue;
    Rational acc = *jv[i];
    bool ok = true;
    for (int j = i + 1; j < n && ok; ++j) {
      const Rational& c = b.at(i, j);
      if (c == 0) continue;
      if (!mv[j]) ok = false;
      else acc -= c * *mv[j];
    }
    if (ok) mv[i] = acc / b.at(i, i);
  }
  std::unique_lock lock(mutex_);
  jack_.emplace(k, std::move(jv));
  monomial_.emplace(k, std::move(mv));
}

std::optional<Rational> MomentFunctional::jack_value(const Partition& lambda) const {
  if (lambda.length() > cone_.q) throw std::invalid_argument("partition longer than rank");
  fill_degree(lambda.weight());
  int i = table_->block(lambda.weight()).index_of(lambda);
  std::shared_lock lock(mutex_);
  return jack_.at(lambda.weight())[i];
}

std::optional<Rational> MomentFunctional::monomial_value(const Partition& kappa) const {
  if (kappa.length() > cone_.q) throw std::invalid_argument("partition longer than rank");
  fill_degree(kappa.weight());
  int i = table_->block(kappa.weight()).index_of(kappa);
  std::shared_lock lock(mutex_);
  return monomial_.at(kappa.weight())[i];
}

namespace {

[[noreturn]] void throw_pole(const Partition& lambda) {
  std::ostringstream os;
  os << "moment functional has a pole: (mu+nu)_lambda = 0 reached from lambda = " << lambda;
  throw MomentPole(os.str(), lambda);
}

}  // namespace

Rational MomentFunctional::value(const Partition& lambda) const {
  auto v = jack_value(lambda);
  if (!v) throw_pole(lambda);
  return *v;
}

Rational MomentFunctional::apply(const SymPolynomial<Rational>& p) const {
  if (p.rank != cone_.q) throw std::invalid_argument("polynomial rank does not match cone");
  if (p.basis == Basis::Jack && !(p.alpha == cone_.alpha))
    throw std::invalid_argument("Jack basis parameter does not match the cone");
  Rational total = 0;
  for (const auto& [part, c] : p.coeffs) {
    auto v = p.basis == Basis::Jack ? jack_value(part) : monomial_value(part);
    if (!v) throw_pole(part);
    total += c * *v;
  }
  return total;
}

Rational moment_value(const Partition& lambda, const ExactBetaParams& params, const ConeStructure& cone) {
  Rational den = pochhammer_gen(Rational(params.mu + params.nu), lambda, cone);
  if (den == 0) throw_pole(lambda);
  return pochhammer_gen(params.mu, lambda, cone) * zlambda_at_identity(lambda, cone) / den;
}

Complex moment_value(const Partition& lambda, const BetaParams& params, const ConeStructure& cone) {
  Complex den = pochhammer_gen(params.mu + params.nu, lambda, cone);
  if (den == 0.0) throw_pole(lambda);
  return pochhammer_gen(params.mu, lambda, cone) * to_double(zlambda_at_identity(lambda, cone)) / den;
}

Rational moment_of_polynomial(const SymPolynomial<Rational>& p, const ExactBetaParams& params,
                              const ConeStructure& cone) {
  int deg = std::max(p.degree(), 0);
  MomentFunctional L(params, cone, SymCaps{std::max(deg, SymCaps{}.max_degree), std::max(cone.q, 3)});
  return L.apply(p);
}

const char* localizer_name(Localizer l) {
  switch (l) {
    case Localizer::One:
      return "one";
    case Localizer::DetX:
      return "det_x";
    case Localizer::DetEminusX:
      return "det_e_minus_x";
  }
  return "?";
}

Localizer parse_localizer(const std::string& name) {
  if (name == "one") return Localizer::One;
  if (name == "det_x") return Localizer::DetX;
  if (name == "det_e_minus_x") return Localizer::DetEminusX;
  throw std::invalid_argument("unknown localizer '" + name + "' (one, det_x, det_e_minus_x)");
}

SymPolynomial<Rational> localizer_polynomial(Localizer l, int q) {
  switch (l) {
    case Localizer::One:
      return SymPolynomial<Rational>::constant(1, q);
    case Localizer::DetX:
      return elementary<Rational>(q, q);
    case Localizer::DetEminusX: {
      SymPolynomial<Rational> p;
      p.rank = q;
      for (int j = 0; j <= q; ++j) p.add(Partition(std::vector<int>(j, 1)), Rational(j % 2 ? -1 : 1));
      return p;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> MomentMatrix::to_double() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(jcone::to_double(e));
  return out;
}

namespace {

// Entries of the largest requested matrix, filled on demand so that smaller
// leading blocks reuse them.
class MatrixBuilder {
 public:
  MatrixBuilder(const MomentFunctional& L, Localizer loc, int dmax)
      : L_(L), index_(enumerate_partitions_upto(dmax, L.cone().q)) {
    auto ell = localizer_polynomial(loc, L.cone().q);
    for (const auto& kappa : index_) {
      auto m = SymPolynomial<Rational>::monomial(kappa, L.cone().q);
      plain_.push_back(m);
      localized_.push_back(sym_multiply(ell, m));
    }
    const std::size_t n = index_.size();
    cache_.assign(n * n, std::nullopt);
  }

  MomentMatrix build(int degree, Localizer loc) {
    MomentMatrix m;
    m.degree = degree;
    m.localizer = loc;
    for (const auto& p : index_)
      if (p.weight() <= degree) m.index.push_back(p);
    const int n = m.size();
    m.entries.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m.entries[i * n + j] = m.entries[j * n + i] = entry(i, j);
    return m;
  }

 private:
  const Rational& entry(int i, int j) {
    auto& slot = cache_[static_cast<std::size_t>(i) * index_.size() + j];
    if (!slot) slot = L_.apply(sym_multiply(localized_[i], plain_[j]));
    return *slot;
  }

  const MomentFunctional& L_;
  std::vector<Partition> index_;
  std::vector<SymPolynomial<Rational>> plain_;
  std::vector<SymPolynomial<Rational>> localized_;
  std::vector<std::optional<Rational>> cache_;
};

// Scale to integer entries with gcd 1.
void normalize_witness(std::vector<Rational>& v) {
  Integer lcm = 1;
  for (const auto& x : v) {
    Integer den = boost::multiprecision::denominator(x);
    lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
  }
  Integer g = 0;
  for (auto& x : v) {
    x *= Rational(lcm);
    g = boost::multiprecision::gcd(g, Integer(boost::multiprecision::numerator(x)));
  }
  if (g > 1)
    for (auto& x : v) x /= Rational(g);
}

Rational quadratic_form(const MomentMatrix& m, const std::vector<Rational>& v) {
  Rational s = 0;
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (v[i] == 0) continue;
    Rational row = 0;
    for (int j = 0; j < n; ++j)
      if (v[j] != 0) row += m.at(i, j) * v[j];
    s += v[i] * row;
  }
  return s;
}

}  // namespace

MomentMatrix moment_matrix(int degree, Localizer localizer, const MomentFunctional& L) {
  if (degree < 0) throw std::invalid_argument("moment matrix degree must be >= 0");
  MatrixBuilder b(L, localizer, degree);
  return b.build(degree, localizer);
}

PsdAnalysis analyze_psd(const MomentMatrix& m) {
  const int n = m.size();
  PsdAnalysis out;
  // Symmetric elimination with explicit combination vectors: s[i][j] = w_i^T M w_j.
  std::vector<std::vector<Rational>> s(n, std::vector<Rational>(n));
  std::vector<std::vector<Rational>> w(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    w[i][i] = 1;
    for (int j = 0; j < n; ++j) s[i][j] = m.at(i, j);
  }
  std::vector<bool> active(n, true);
  for (;;) {
    int neg = -1, pos = -1;
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (s[i][i] < 0 && neg < 0) neg = i;
      if (s[i][i] > 0 && pos < 0) pos = i;
    }
    if (neg >= 0) {
      out.psd = false;
      out.witness = w[neg];
      break;
    }
    if (pos < 0) {
      // Every remaining diagonal entry is zero; any off-diagonal entry then
      // yields a negative direction w_i - sign(s_ij) w_j.
      for (int i = 0; i < n && out.psd; ++i) {
        if (!active[i]) continue;
        for (int j = i + 1; j < n; ++j) {
          if (!active[j] || s[i][j] == 0) continue;
          out.psd = false;
          out.witness = w[i];
          Rational sign = s[i][j] > 0 ? Rational(-1) : Rational(1);
          for (int t = 0; t < n; ++t) out.witness[t] += sign * w[j][t];
          break;
        }
      }
      break;
    }
    ++out.rank;
    active[pos] = false;
    const Rational pivot = s[pos][pos];
    for (int i = 0; i < n; ++i) {
      if (!active[i] || s[i][pos] == 0) continue;
      Rational f = s[i][pos] / pivot;
      for (int j = 0; j < n; ++j)
        if (active[j]) s[i][j] -= f * s[pos][j];
      for (int t = 0; t < n; ++t)
        if (w[pos][t] != 0) w[i][t] -= f * w[pos][t];
    }
  }
  if (!out.psd) {
    normalize_witness(out.witness);
    out.witness_value = quadratic_form(m, out.witness);
    if (!(out.witness_value < 0)) throw std::logic_error("witness does not certify a negative direction");
  }
  // Float spectrum of D^{-1/2} M D^{-1/2}, D = diag(M) where positive; congruence keeps the inertia.
  auto a = m.to_double();
  std::vector<double> scale(n, 1.0);
  for (int i = 0; i < n; ++i) {
    double d = a[i * n + i];
    if (d > 0) scale[i] = 1 / std::sqrt(d);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] *= scale[i] * scale[j];
  if (n > 0) {
    auto e = symmetric_eigen(a, n);
    out.min_eigenvalue = e.values[0];
    out.min_eigenvector.resize(n);
    for (int i = 0; i < n; ++i) out.min_eigenvector[i] = e.vectors[i * n] * scale[i];
  }
  return out;
}

PositivityVerdict positivity_classify(const Rational& mu, const Rational& nu, const ConeStructure& cone, int dmax,
                                      bool require_hypothesis) {
  if (dmax < 1) throw std::invalid_argument("dmax must be >= 1");
  PositivityVerdict v;
  v.dmax = dmax;
  v.k = std::max(1, minimal_extension_level(nu, cone));
  v.hypothesis_met = positivity_hypothesis_holds(mu, v.k, cone);
  if (require_hypothesis && !v.hypothesis_met) {
    std::ostringstream os;
    os << "hypothesis mu > mu0 + k q + 3/2 fails for k = " << v.k << " (mu = " << mu << ")";
    throw std::invalid_argument(os.str());
  }
  auto params = ExactBetaParams::make(mu, nu, v.k, cone);
  MomentFunctional L(params, cone, moment_caps(dmax, cone.q));
  const Localizer order[] = {Localizer::One, Localizer::DetX, Localizer::DetEminusX};
  std::vector<MatrixBuilder> builders;
  for (Localizer loc : order) builders.emplace_back(L, loc, dmax);
  for (int d = 1; d <= dmax; ++d) {
    for (int li = 0; li < 3; ++li) {
      MomentMatrix m = builders[li].build(d, order[li]);
      PsdAnalysis a = analyze_psd(m);
      if (!a.psd) {
        v.witness = NegativeWitness{d, order[li], m.index, a.witness, a.witness_value, a.min_eigenvalue};
        return v;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Rank-1 extension

namespace {

// Gamma(a + s) / Gamma(a) for integer s, exact.
Rational gamma_shift_ratio(const Rational& a, int s) {
  Rational r = 1;
  if (s >= 0) {
    for (int i = 0; i < s; ++i) r *= a + i;
  } else {
    for (int i = s; i < 0; ++i) r /= a + i;
  }
  return r;
}

}  // namespace

Rational dist_ext_rank1_exact(const std::vector<Rational>& coeffs, const Rational& mu, const Rational& nu, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (!(mu > k)) throw std::invalid_argument("need mu > k so that x^{mu-1} is k times differentiable");
  if (!(nu + k > 0)) throw std::invalid_argument("need nu > -k");
  Rational total = 0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (coeffs[m] == 0) continue;
    // (d/dx)^k x^{mu-1+m} = ff(mu-1+m, k) x^{mu-1+m-k}
    Rational ff = 1;
    for (int i = 0; i < k; ++i) ff *= mu - 1 + static_cast<long>(m) - i;
    // Gamma(mu+nu)/(Gamma(mu) Gamma(nu+k)) * B(mu+m-k, nu+k)
    //   = [Gamma(mu+m-k)/Gamma(mu)] [Gamma(mu+nu)/Gamma(mu+nu+m)]
    Rational beta_part = gamma_shift_ratio(mu, static_cast<int>(m) - k) /
                         gamma_shift_ratio(mu + nu, static_cast<int>(m));
    total += coeffs[m] * ff * beta_part;
  }
  return total;
}

double dist_ext_rank1(const std::vector<double>& coeffs, double mu, double nu, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (!(mu > k)) throw std::invalid_argument("need mu > k so that x^{mu-1} is k times differentiable");
  if (!(nu + k > 0)) throw std::invalid_argument("need nu > -k");
  double log_pre = std::lgamma(mu + nu) - std::lgamma(mu) - std::lgamma(nu + k);
  double total = 0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (coeffs[m] == 0) continue;
    double ff = 1;
    for (int i = 0; i < k; ++i) ff *= mu - 1 + static_cast<double>(m) - i;
    double a = mu + static_cast<double>(m) - k, b = nu + k;
    double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    total += coeffs[m] * ff * std::exp(log_pre + log_beta);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Product relation

ProductRelationReport product_relation_check(const Rational& mu, const Rational& nu, const ConeStructure& cone,
                                             int degree) {
  ProductRelationReport rep;
  rep.factor = 1;
  for (int j = 0; j < cone.q; ++j) {
    Rational den = mu + nu - cone.half_d() * j;
    if (den == 0) throw MomentPole("product relation factor has a zero denominator", Partition{});
    rep.factor *= (nu - cone.half_d() * j) / den;
  }
  SymCaps caps{std::max(degree + cone.q, SymCaps{}.max_degree), std::max(cone.q, 3)};
  MomentFunctional lhs_L(ExactBetaParams::make(mu, nu, minimal_extension_level(nu, cone), cone), cone, caps);
  Rational nu1 = nu + 1;
  MomentFunctional rhs_L(ExactBetaParams::make(mu, nu1, minimal_extension_level(nu1, cone), cone), cone, caps);
  auto ell = localizer_polynomial(Localizer::DetEminusX, cone.q);
  rep.max_discrepancy = 0;
  for (const auto& kappa : enumerate_partitions_upto(degree, cone.q)) {
    auto m = SymPolynomial<Rational>::monomial(kappa, cone.q);
    Rational lhs = lhs_L.apply(sym_multiply(ell, m));
    Rational rhs = rep.factor * rhs_L.apply(m);
    rep.max_discrepancy = std::max(rep.max_discrepancy, abs_value(Rational(lhs - rhs)));
    rep.lhs.emplace_back(kappa, lhs);
    ++rep.polynomials;
  }
  return rep;
}

}  // namespace jcone
