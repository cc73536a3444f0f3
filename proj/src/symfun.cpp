#include "jcone/symfun.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

namespace jcone {

namespace {

template <class Scalar>
std::string alpha_key(const Scalar& alpha);

template <>
std::string alpha_key<Rational>(const Rational& alpha) {
  return "q:" + alpha.str();
}

template <>
std::string alpha_key<double>(const double& alpha) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &alpha, sizeof bits);
  return "d:" + std::to_string(bits);
}

template <>
std::string alpha_key<long double>(const long double& alpha) {
  std::ostringstream os;
  os.precision(30);
  os << "ld:" << alpha;
  return os.str();
}

bool weakly_decreasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

// alpha^k k! / prod_{s in lambda} (alpha*arm(s) + leg(s) + alpha): turns the
// monic P_lambda into C_lambda.
template <class Scalar>
Scalar c_normalization(const Partition& lambda, const Scalar& alpha) {
  Partition conj = lambda.conjugate();
  Scalar num(1);
  for (int i = 1; i <= lambda.weight(); ++i) num *= alpha * Scalar(i);
  Scalar den(1);
  for (int i = 0; i < lambda.length(); ++i) {
    for (int j = 0; j < lambda[i]; ++j) {
      int arm = lambda[i] - j - 1;
      int leg = conj[j] - i - 1;
      den *= alpha * Scalar(arm) + Scalar(leg) + alpha;
    }
  }
  return num / den;
}

}  // namespace

template <class Scalar>
int JackTable<Scalar>::Block::index_of(const Partition& p) const {
  auto it = index.find(p);
  if (it == index.end()) throw std::out_of_range("partition " + p.str() + " not in degree block");
  return it->second;
}

template <class Scalar>
JackTable<Scalar>::JackTable(Scalar alpha, int rank, SymCaps caps)
    : alpha_(std::move(alpha)), rank_(rank), caps_(caps) {
  if (!(alpha_ > Scalar(0))) throw std::invalid_argument("Jack parameter alpha must be positive");
  if (rank_ < 1) throw std::invalid_argument("rank must be >= 1");
  if (rank_ > caps_.max_rank)
    throw CapExceeded("rank " + std::to_string(rank_) + " exceeds rank cap " + std::to_string(caps_.max_rank));
}

template <class Scalar>
const typename JackTable<Scalar>::Block& JackTable<Scalar>::block(int degree) const {
  if (degree < 0) throw std::invalid_argument("negative degree");
  if (degree > caps_.max_degree)
    throw CapExceeded("degree " + std::to_string(degree) + " exceeds degree cap " +
                      std::to_string(caps_.max_degree));
  {
    std::shared_lock lock(mutex_);
    if (static_cast<std::size_t>(degree) < blocks_.size() && blocks_[degree]) return *blocks_[degree];
  }
  auto fresh = build(degree);
  std::unique_lock lock(mutex_);
  if (blocks_.size() <= static_cast<std::size_t>(degree)) blocks_.resize(degree + 1);
  if (!blocks_[degree]) blocks_[degree] = std::move(fresh);
  return *blocks_[degree];
}

// Monic Jack polynomials P_kappa are eigenfunctions of
//   D = (alpha/2) sum x_i^2 d_i^2 + sum_{i != j} x_i^2/(x_i - x_j) d_i
// and D is lower triangular on monomial symmetric functions in dominance order.
// For a pair of variables the symmetrized action on x^A y^B + x^B y^A (A > B) is
//   A (x^A y^B + x^B y^A) + (A - B) sum_{u=1}^{A-B-1} x^{A-u} y^{B+u}.
template <class Scalar>
std::unique_ptr<typename JackTable<Scalar>::Block> JackTable<Scalar>::build(int degree) const {
  auto blk = std::make_unique<Block>();
  blk->parts = enumerate_partitions(degree, rank_);
  const int n = static_cast<int>(blk->parts.size());
  std::map<std::vector<int>, int> by_exponent;
  for (int i = 0; i < n; ++i) {
    blk->index.emplace(blk->parts[i], i);
    by_exponent.emplace(blk->parts[i].padded(rank_), i);
    blk->perms.push_back(distinct_permutations(blk->parts[i], rank_));
  }

  std::vector<Scalar> eig(n);
  // lowered[j]: (l, D[l -> j]) for l != j
  std::vector<std::vector<std::pair<int, Scalar>>> lowered(n);
  for (int i = 0; i < n; ++i) {
    const Partition& lam = blk->parts[i];
    Scalar e(0);
    for (int s = 0; s < rank_; ++s) {
      e += alpha_ / Scalar(2) * Scalar(lam[s]) * Scalar(lam[s] - 1);
      e += Scalar(rank_ - 1 - s) * Scalar(lam[s]);
    }
    eig[i] = e;

    std::map<int, long> hits;
    for (const auto& a : blk->perms[i]) {
      for (int s = 0; s < rank_; ++s) {
        for (int t = s + 1; t < rank_; ++t) {
          int big = a[s], small = a[t];
          if (big <= small + 1) continue;
          std::vector<int> b = a;
          for (int u = 1; u <= big - small - 1; ++u) {
            b[s] = big - u;
            b[t] = small + u;
            if (!weakly_decreasing(b)) continue;
            int j = by_exponent.at(b);
            hits[j] += big - small;
          }
        }
      }
    }
    for (const auto& [j, w] : hits) lowered[j].emplace_back(i, Scalar(w));
  }

  blk->coeff.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Scalar>& row = blk->coeff[i];
    row.assign(n - i, Scalar(0));
    row[0] = Scalar(1);
    for (int j = i + 1; j < n; ++j) {
      Scalar acc(0);
      for (const auto& [l, w] : lowered[j]) {
        if (l < i) continue;
        const Scalar& c = row[l - i];
        if (!(c == Scalar(0))) acc += c * w;
      }
      if (acc == Scalar(0)) continue;
      Scalar gap = eig[i] - eig[j];
      if (gap == Scalar(0)) throw std::logic_error("degenerate Jack eigenvalues in recurrence");
      row[j - i] = acc / gap;
    }
    Scalar scale = c_normalization(blk->parts[i], alpha_);
    for (auto& c : row)
      if (!(c == Scalar(0))) c *= scale;
  }
  return blk;
}

template <class Scalar>
Scalar JackTable<Scalar>::coefficient(const Partition& lambda, const Partition& mu) const {
  if (lambda.weight() != mu.weight()) return Scalar(0);
  if (lambda.length() > rank_ || mu.length() > rank_) return Scalar(0);
  const Block& b = block(lambda.weight());
  int i = b.index_of(lambda), j = b.index_of(mu);
  if (j < i) return Scalar(0);
  return b.at(i, j);
}

template <class Scalar>
std::shared_ptr<const JackTable<Scalar>> jack_table(const Scalar& alpha, int rank, SymCaps caps) {
  static std::mutex mutex;
  static std::unordered_map<std::string, std::shared_ptr<const JackTable<Scalar>>> tables;
  std::string key = alpha_key(alpha) + "/" + std::to_string(rank) + "/" + std::to_string(caps.max_degree) +
                    "/" + std::to_string(caps.max_rank);
  std::lock_guard lock(mutex);
  auto& slot = tables[key];
  if (!slot) slot = std::make_shared<const JackTable<Scalar>>(alpha, rank, caps);
  return slot;
}

// ---------------------------------------------------------------------------

template <class Scalar>
SymPolynomial<Scalar> SymPolynomial<Scalar>::constant(const Scalar& c, int rank) {
  SymPolynomial p;
  p.rank = rank;
  p.add(Partition{}, c);
  return p;
}

template <class Scalar>
SymPolynomial<Scalar> SymPolynomial<Scalar>::monomial(const Partition& part, int rank, const Scalar& c) {
  if (part.length() > rank) throw std::invalid_argument("partition longer than rank");
  SymPolynomial p;
  p.rank = rank;
  p.add(part, c);
  return p;
}

template <class Scalar>
void SymPolynomial<Scalar>::add(const Partition& part, const Scalar& c) {
  if (c == Scalar(0)) return;
  auto [it, inserted] = coeffs.try_emplace(part, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Scalar(0)) coeffs.erase(it);
  }
}

template <class Scalar>
int SymPolynomial<Scalar>::degree() const {
  return coeffs.empty() ? -1 : coeffs.rbegin()->first.weight();
}

template <class Scalar>
SymPolynomial<Scalar> jack_expand_monomial(const Partition& lambda, const JackTable<Scalar>& table) {
  if (lambda.length() > table.rank()) throw std::invalid_argument("partition longer than rank");
  const auto& b = table.block(lambda.weight());
  int i = b.index_of(lambda);
  SymPolynomial<Scalar> out;
  out.rank = table.rank();
  for (int j = i; j < static_cast<int>(b.parts.size()); ++j) out.add(b.parts[j], b.at(i, j));
  return out;
}

SymPolynomial<Rational> jack_expand_monomial(const Partition& lambda, const Rational& alpha, int rank,
                                             SymCaps caps) {
  return jack_expand_monomial(lambda, *jack_table(alpha, rank, caps));
}

template <class Scalar>
Scalar monomial_eval(const Partition& p, std::span<const Scalar> xi) {
  int n = static_cast<int>(xi.size());
  if (p.length() > n) return Scalar(0);
  Scalar total(0);
  for (const auto& e : distinct_permutations(p, n)) {
    Scalar term(1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < e[i]; ++k) term *= xi[i];
    total += term;
  }
  return total;
}

namespace {

template <class Scalar>
Scalar eval_with_block(const typename JackTable<Scalar>::Block& b, int row, std::span<const Scalar> xi) {
  Scalar total(0);
  const int n = static_cast<int>(b.parts.size());
  for (int j = row; j < n; ++j) {
    const Scalar& c = b.at(row, j);
    if (c == Scalar(0)) continue;
    Scalar m(0);
    for (const auto& e : b.perms[j]) {
      Scalar term(1);
      for (std::size_t v = 0; v < e.size(); ++v)
        for (int k = 0; k < e[v]; ++k) term *= xi[v];
      m += term;
    }
    total += c * m;
  }
  return total;
}

}  // namespace

double jack_eval(const Partition& lambda, double alpha, std::span<const double> xi) {
  int rank = static_cast<int>(xi.size());
  SymCaps caps;
  caps.max_degree = std::max(caps.max_degree, lambda.weight());
  caps.max_rank = std::max(caps.max_rank, rank);
  auto table = jack_table(alpha, rank, caps);
  if (lambda.length() > rank) return 0.0;
  const auto& b = table->block(lambda.weight());
  return eval_with_block<double>(b, b.index_of(lambda), xi);
}

Rational jack_eval(const Partition& lambda, const JackTable<Rational>& table, std::span<const Rational> xi) {
  if (static_cast<int>(xi.size()) != table.rank()) throw std::invalid_argument("point dimension != rank");
  if (lambda.length() > table.rank()) return Rational(0);
  const auto& b = table.block(lambda.weight());
  return eval_with_block<Rational>(b, b.index_of(lambda), xi);
}

template <class Scalar>
Scalar jack_at_ones(const Partition& lambda, const JackTable<Scalar>& table) {
  if (lambda.length() > table.rank()) return Scalar(0);
  const auto& b = table.block(lambda.weight());
  int i = b.index_of(lambda);
  Scalar total(0);
  for (int j = i; j < static_cast<int>(b.parts.size()); ++j)
    total += b.at(i, j) * Scalar(static_cast<long>(b.perms[j].size()));
  return total;
}

template <class Scalar>
SymPolynomial<Scalar> sym_multiply(const SymPolynomial<Scalar>& p, const SymPolynomial<Scalar>& r) {
  if (p.basis != Basis::MonomialSymmetric || r.basis != Basis::MonomialSymmetric)
    throw std::invalid_argument("sym_multiply requires the monomial-symmetric basis");
  if (p.rank != r.rank) throw std::invalid_argument("sym_multiply rank mismatch");
  const int n = p.rank;
  SymPolynomial<Scalar> out;
  out.rank = n;
  // m_k * m_l = sum over (a in S(k), b in S(l)) with a + b decreasing of m_{a+b}.
  std::map<Partition, std::vector<std::vector<int>>, CanonicalOrder> perm_cache;
  auto perms_of = [&](const Partition& part) -> const std::vector<std::vector<int>>& {
    auto it = perm_cache.find(part);
    if (it == perm_cache.end()) it = perm_cache.emplace(part, distinct_permutations(part, n)).first;
    return it->second;
  };
  for (const auto& [kp, kc] : p.coeffs) {
    for (const auto& [lp, lc] : r.coeffs) {
      std::map<Partition, long, CanonicalOrder> exact;
      for (const auto& aa : perms_of(kp)) {
        for (const auto& b : perms_of(lp)) {
          std::vector<int> s(n);
          for (int i = 0; i < n; ++i) s[i] = aa[i] + b[i];
          if (weakly_decreasing(s)) exact[Partition(s)] += 1;
        }
      }
      Scalar prod = kc * lc;
      for (const auto& [nu, cnt] : exact) out.add(nu, prod * Scalar(cnt));
    }
  }
  return out;
}

template <class Scalar>
SymPolynomial<Scalar> basis_convert(const SymPolynomial<Scalar>& p, Basis target, const JackTable<Scalar>& table) {
  if (p.basis == target) return p;
  if (p.rank != table.rank()) throw std::invalid_argument("basis_convert rank mismatch");
  if (p.basis == Basis::Jack && !(p.alpha == table.alpha()))
    throw std::invalid_argument("basis_convert Jack parameter mismatch");
  SymPolynomial<Scalar> out;
  out.rank = p.rank;
  out.basis = target;
  if (target == Basis::Jack) out.alpha = table.alpha();

  if (target == Basis::MonomialSymmetric) {
    for (const auto& [lam, c] : p.coeffs) {
      const auto& b = table.block(lam.weight());
      int i = b.index_of(lam);
      for (int j = i; j < static_cast<int>(b.parts.size()); ++j) {
        const Scalar& cij = b.at(i, j);
        if (!(cij == Scalar(0))) out.add(b.parts[j], c * cij);
      }
    }
    return out;
  }

  // Monomial -> Jack: per degree, back-substitute through the upper triangular table.
  std::map<int, std::vector<Scalar>> residual;
  for (const auto& [mu, c] : p.coeffs) {
    const auto& b = table.block(mu.weight());
    auto& r = residual[mu.weight()];
    if (r.empty()) r.assign(b.parts.size(), Scalar(0));
    r[b.index_of(mu)] += c;
  }
  for (auto& [deg, r] : residual) {
    const auto& b = table.block(deg);
    const int n = static_cast<int>(b.parts.size());
    for (int i = 0; i < n; ++i) {
      if (r[i] == Scalar(0)) continue;
      Scalar coef = r[i] / b.at(i, i);
      out.add(b.parts[i], coef);
      for (int j = i; j < n; ++j) {
        const Scalar& cij = b.at(i, j);
        if (!(cij == Scalar(0))) r[j] -= coef * cij;
      }
    }
  }
  return out;
}

template <class Scalar>
Scalar sym_eval(const SymPolynomial<Scalar>& p, std::span<const Scalar> xi, const JackTable<Scalar>* table) {
  if (static_cast<int>(xi.size()) != p.rank) throw std::invalid_argument("point dimension != rank");
  Scalar total(0);
  if (p.basis == Basis::MonomialSymmetric) {
    for (const auto& [mu, c] : p.coeffs) total += c * monomial_eval<Scalar>(mu, xi);
    return total;
  }
  if (!table) throw std::invalid_argument("Jack basis evaluation needs a table");
  for (const auto& [lam, c] : p.coeffs) {
    const auto& b = table->block(lam.weight());
    total += c * eval_with_block<Scalar>(b, b.index_of(lam), xi);
  }
  return total;
}

template <class Scalar>
SymPolynomial<Scalar> elementary(int j, int rank) {
  if (j < 0 || j > rank) return SymPolynomial<Scalar>{Basis::MonomialSymmetric, Scalar{}, rank, {}};
  return SymPolynomial<Scalar>::monomial(Partition(std::vector<int>(j, 1)), rank);
}

#define JCONE_INSTANTIATE(S)                                                                         \
  template class JackTable<S>;                                                                       \
  template struct SymPolynomial<S>;                                                                  \
  template std::shared_ptr<const JackTable<S>> jack_table<S>(const S&, int, SymCaps);                \
  template SymPolynomial<S> jack_expand_monomial<S>(const Partition&, const JackTable<S>&);          \
  template S jack_at_ones<S>(const Partition&, const JackTable<S>&);                                 \
  template S monomial_eval<S>(const Partition&, std::span<const S>);                                 \
  template SymPolynomial<S> sym_multiply<S>(const SymPolynomial<S>&, const SymPolynomial<S>&);       \
  template SymPolynomial<S> basis_convert<S>(const SymPolynomial<S>&, Basis, const JackTable<S>&);   \
  template S sym_eval<S>(const SymPolynomial<S>&, std::span<const S>, const JackTable<S>*);          \
  template SymPolynomial<S> elementary<S>(int, int);

JCONE_INSTANTIATE(Rational)
JCONE_INSTANTIATE(double)
template class JackTable<long double>;
template std::shared_ptr<const JackTable<long double>> jack_table<long double>(const long double&, int, SymCaps);

#undef JCONE_INSTANTIATE

}  // namespace jcone
