#include "jcone/sonine.hpp"

#include "jcone/mc.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jcone {

double j_bessel(double alpha, double z) {
  if (!(alpha > -1)) throw std::invalid_argument("j_alpha needs alpha > -1");
  const double w = -z * z / 4;
  double term = 1, sum = 1;
  for (int m = 1; m < 500; ++m) {
    term *= w / (m * (alpha + m));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && m > std::abs(w)) return sum;
  }
  throw NonConvergence("j_alpha series did not converge", std::abs(term));
}

Rank1SonineReport sonine_rank1_quadrature(double alpha, double beta, std::span<const double> z) {
  if (!(alpha > -1)) throw std::invalid_argument("rank-1 Sonine needs alpha > -1");
  if (!(beta > 0)) throw std::invalid_argument("rank-1 Sonine needs beta > 0");
  Rank1SonineReport rep{alpha, beta, 0, 0, z.size()};
  const double pre = std::exp(std::lgamma(alpha + beta + 1) - std::lgamma(alpha + 1) - std::lgamma(beta));
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double zz : z) {
    // tc is the signed distance to the nearer endpoint
    auto f = [&](double t, double tc) {
      double one_minus_t = tc > 0 ? tc : 1 - t;
      return j_bessel(alpha, zz * std::sqrt(one_minus_t)) * std::pow(one_minus_t, alpha) * std::pow(t, beta - 1);
    };
    double rhs = pre * integrator.integrate(f, 0.0, 1.0, 1e-15);
    double res = std::abs(j_bessel(alpha + beta, zz) - rhs);
    if (res >= rep.max_residual) {
      rep.max_residual = res;
      rep.worst_z = zz;
    }
  }
  return rep;
}

namespace {

constexpr std::uint64_t kSonineStream = 0x50;
constexpr std::uint64_t kComposeStream = 0xC0;

}  // namespace

SonineMcReport sonine_cone_mc(const BetaSampler& sampler, const ConeElement& r, std::uint64_t samples,
                              std::uint64_t seed, int jobs) {
  const ConeStructure& cone = sampler.cone();
  if (r.rank() != cone.q || r.field() != cone.field) throw std::invalid_argument("r does not match the cone");
  if (!in_omega_bar(r)) throw std::invalid_argument("r must lie in the closed cone");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  const double mu = sampler.mu(), nu = sampler.nu();
  BesselSeries inner(mu, cone);
  SonineMcReport rep;
  rep.exact = bessel_eval(mu + nu, r, cone).value.real();
  rep.samples = samples;
  // P(sqrt s) r and P(sqrt r) s share their spectrum.
  const SmallMat root = sqrt_psd(r).matrix();
  ChunkPlan plan{samples, 4096};
  auto acc = run_chunks<MeanAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kSonineStream, c);
    MeanAcc a(1);
    for (std::uint64_t i = 0; i < count; ++i) {
      ConeElement s = sampler.draw(rng);
      ConeElement y(cone.field, root * s.matrix() * root, ConeTolerance{0.0, 1e-10});
      a.add(0, inner.evaluate(y.eigenvalues()).value.real());
    }
    a.n = count;
    return a;
  });
  rep.mean = acc.mean(0);
  rep.se = acc.se(0);
  rep.residual = std::abs(rep.exact - rep.mean);
  return rep;
}

SonineMcReport sonine_cone_mc(double mu, double nu, const ConeElement& r, const ConeStructure& cone,
                              std::uint64_t samples, std::uint64_t seed, int jobs) {
  if (!(mu > cone.mu0_value()) || !(nu > cone.mu0_value()))
    throw std::invalid_argument("cone Sonine Monte Carlo needs mu, nu > mu0 (use a group-case sampler otherwise)");
  return sonine_cone_mc(BetaSampler(WishartFactor::bartlett(mu), WishartFactor::bartlett(nu), cone), r, samples,
                        seed, jobs);
}

ExtendedSonineReport sonine_extended_polynomial(const Rational& mu, const Rational& nu, const ConeStructure& cone,
                                                const std::vector<std::vector<double>>& r_grid, int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int k_ext = minimal_extension_level(nu, cone);
  SymCaps caps{std::max(degree, SymCaps{}.max_degree), std::max(cone.q, SymCaps{}.max_rank)};
  MomentFunctional L(ExactBetaParams::make(mu, nu, k_ext, cone), cone, caps);
  auto table = jack_table(cone.alpha, cone.q, caps);
  const bool rank1 = cone.q == 1 && mu > k_ext;

  ExtendedSonineReport rep;
  rep.degree = degree;
  if (rank1) rep.rank1_mismatches = 0;
  std::vector<Partition> parts;
  std::vector<double> lhs_coeff, rhs_coeff;
  Rational fact = 1;
  for (int k = 0; k <= degree; ++k) {
    if (k) fact *= k;
    const Rational sign = k % 2 ? Rational(-1) : Rational(1);
    for (const auto& lam : enumerate_partitions(k, cone.q)) {
      Rational mu_nu_poch = pochhammer_gen(Rational(mu + nu), lam, cone);
      Rational mu_poch = pochhammer_gen(mu, lam, cone);
      if (mu_nu_poch == 0 || mu_poch == 0) {
        std::ostringstream os;
        os << "Pochhammer pole at lambda = " << lam;
        throw MomentPole(os.str(), lam);
      }
      // L is applied to the monomial expansion so the back substitution is exercised.
      Rational l_z = L.apply(jack_expand_monomial(lam, *table));
      Rational lhs = sign / (mu_nu_poch * fact);
      Rational rhs = sign / (mu_poch * fact) * l_z / zlambda_at_identity(lam, cone);
      if (lhs != rhs) ++rep.exact_mismatches;
      if (rank1) {
        std::vector<Rational> coeffs(k + 1, Rational(0));
        coeffs[k] = 1;
        Rational via_rank1 = sign / (mu_poch * fact) * dist_ext_rank1_exact(coeffs, mu, nu, k_ext);
        if (via_rank1 != lhs) ++*rep.rank1_mismatches;
      }
      parts.push_back(lam);
      lhs_coeff.push_back(to_double(lhs));
      rhs_coeff.push_back(to_double(rhs));
      ++rep.terms;
    }
  }
  const double alpha = cone.alpha_value();
  for (const auto& r : r_grid) {
    if (static_cast<int>(r.size()) != cone.q) throw std::invalid_argument("grid spectrum has the wrong length");
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      double z = jack_eval(parts[i], alpha, r);
      lhs += lhs_coeff[i] * z;
      rhs += rhs_coeff[i] * z;
    }
    rep.max_poly_residual = std::max(rep.max_poly_residual, std::abs(lhs - rhs));
    double full = bessel_eval(to_double(Rational(mu + nu)), ConeElement::from_spectrum(cone.field, r), cone)
                      .value.real();
    rep.max_tail = std::max(rep.max_tail, std::abs(full - lhs));
  }
  return rep;
}

bool CompositionReport::all_within() const {
  return std::all_of(moments.begin(), moments.end(), [](const CompositionMoment& m) { return m.within; });
}

CompositionReport composition_check(double mu, double nu1, double nu2, const ConeStructure& cone,
                                    std::uint64_t samples, std::uint64_t seed, int jobs, int max_degree,
                                    double bands) {
  if (!(mu > 2 * cone.mu0_value() + 1)) throw std::invalid_argument("composition check needs mu > 2 mu0 + 1");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  BetaSampler first = BetaSampler::for_parameters(mu, nu1, cone);
  BetaSampler second = BetaSampler::for_parameters(mu + nu1, nu2, cone);
  std::vector<Partition> parts;
  for (const auto& p : enumerate_partitions_upto(max_degree, cone.q))
    if (p.weight() > 0) parts.push_back(p);
  const double alpha = cone.alpha_value();
  ChunkPlan plan{samples, 4096};
  auto acc = run_chunks<MeanAcc>(plan, jobs, [&](std::uint64_t c, std::uint64_t count) {
    auto rng = chunk_rng(seed, kComposeStream, c);
    MeanAcc a(parts.size());
    for (std::uint64_t i = 0; i < count; ++i) {
      ConeElement r = first.draw(rng);
      ConeElement s = second.draw(rng);
      SmallMat root = sqrt_psd(s).matrix();
      ConeElement x(cone.field, root * r.matrix() * root, ConeTolerance{0.0, 1e-10});
      for (std::size_t j = 0; j < parts.size(); ++j) a.add(j, jack_eval(parts[j], alpha, x.eigenvalues()));
    }
    a.n = count;
    return a;
  });
  CompositionReport rep;
  rep.samples = samples;
  BetaParams target = BetaParams::make(mu, nu1 + nu2, 0, cone);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    CompositionMoment m;
    m.lambda = parts[j];
    m.expected = moment_value(parts[j], target, cone).real();
    m.mean = acc.mean(j);
    m.se = acc.se(j);
    double diff = std::abs(m.mean - m.expected);
    m.within = m.se > 0 ? diff <= bands * m.se : diff <= 1e-12;
    rep.moments.push_back(m);
  }
  return rep;
}

const char* theorem_b_status_name(TheoremBStatus s) {
  switch (s) {
    case TheoremBStatus::Positive:
      return "no_obstruction";
    case TheoremBStatus::Negative:
      return "negative_witness";
    case TheoremBStatus::Inconclusive:
      return "inconclusive";
    case TheoremBStatus::HardFailure:
      return "hard_failure";
  }
  return "?";
}

bool TheoremBTable::any_hard_failure() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const TheoremBRow& r) { return r.status == TheoremBStatus::HardFailure; });
}

TheoremBTable theorem_b_table(const ConeStructure& cone, const Rational& mu, const std::vector<Rational>& nus,
                              int dmax) {
  for (const auto& nu : nus) {
    int k = std::max(1, minimal_extension_level(nu, cone));
    if (!positivity_hypothesis_holds(mu, k, cone)) {
      std::ostringstream os;
      os << "mu = " << mu << " fails mu > mu0 + k q + 3/2 for nu = " << nu << " (k = " << k << ")";
      throw std::invalid_argument(os.str());
    }
  }
  TheoremBTable t{cone, mu, dmax, {}};
  for (const auto& nu : nus) {
    TheoremBRow row;
    row.nu = nu;
    row.wallach = wallach_contains(nu, cone);
    row.verdict = positivity_classify(mu, nu, cone, dmax);
    if (row.wallach)
      row.status = row.verdict.conclusive() ? TheoremBStatus::HardFailure : TheoremBStatus::Positive;
    else
      row.status = row.verdict.conclusive() ? TheoremBStatus::Negative : TheoremBStatus::Inconclusive;
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace jcone
