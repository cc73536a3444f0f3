#pragma once

#include "jcone/partition.hpp"
#include "jcone/rational.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace jcone {

/// Configured limits for the exact symmetric-function machinery.
struct SymCaps {
  int max_degree = 8;
  int max_rank = 3;
};

class CapExceeded : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Monomial-symmetric coefficients of the Jack polynomials C^alpha_lambda in
/// `rank` variables, normalized so that sum_{|lambda|=k} C_lambda = (x_1+...+x_q)^k.
///
/// Rows are computed one degree at a time and memoized. The table is safe to
/// share between threads: readers take a shared lock, building a degree takes
/// the exclusive lock.
template <class Scalar>
class JackTable {
 public:
  struct Block {
    std::vector<Partition> parts;  // reverse lexicographic
    /// coeff[i][j - i] is the coefficient of m_{parts[j]} in C_{parts[i]}, j >= i.
    std::vector<std::vector<Scalar>> coeff;
    /// Distinct exponent vectors of each partition (padded to rank).
    std::vector<std::vector<std::vector<int>>> perms;
    std::map<Partition, int, CanonicalOrder> index;

    int index_of(const Partition& p) const;
    const Scalar& at(int row, int col) const { return coeff[row][col - row]; }
  };

  JackTable(Scalar alpha, int rank, SymCaps caps = {});

  const Scalar& alpha() const { return alpha_; }
  int rank() const { return rank_; }
  const SymCaps& caps() const { return caps_; }

  /// Throws CapExceeded above caps().max_degree.
  const Block& block(int degree) const;

  /// Coefficient of m_mu in C_lambda.
  Scalar coefficient(const Partition& lambda, const Partition& mu) const;

 private:
  std::unique_ptr<Block> build(int degree) const;

  Scalar alpha_;
  int rank_;
  SymCaps caps_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::unique_ptr<Block>> blocks_;
};

/// Process-wide memo of tables keyed by (alpha, rank, caps).
template <class Scalar>
std::shared_ptr<const JackTable<Scalar>> jack_table(const Scalar& alpha, int rank, SymCaps caps = {});

enum class Basis { MonomialSymmetric, Jack };

/// Symmetric polynomial in `rank` eigenvalue variables, stored sparsely in one basis.
template <class Scalar>
struct SymPolynomial {
  Basis basis = Basis::MonomialSymmetric;
  Scalar alpha{};  // Jack parameter, meaningful when basis == Jack
  int rank = 1;
  std::map<Partition, Scalar, CanonicalOrder> coeffs;

  static SymPolynomial constant(const Scalar& c, int rank);
  static SymPolynomial monomial(const Partition& p, int rank, const Scalar& c = Scalar(1));

  /// Adds c to the coefficient of p, dropping it if the result is zero.
  void add(const Partition& p, const Scalar& c);
  int degree() const;
  bool is_zero() const { return coeffs.empty(); }
};

/// C^alpha_lambda in the monomial-symmetric basis.
template <class Scalar>
SymPolynomial<Scalar> jack_expand_monomial(const Partition& lambda, const JackTable<Scalar>& table);

SymPolynomial<Rational> jack_expand_monomial(const Partition& lambda, const Rational& alpha, int rank,
                                             SymCaps caps = {});

/// C^alpha_lambda(xi) evaluated through the monomial expansion.
double jack_eval(const Partition& lambda, double alpha, std::span<const double> xi);
Rational jack_eval(const Partition& lambda, const JackTable<Rational>& table, std::span<const Rational> xi);

/// C^alpha_lambda(1,...,1) in rank variables.
template <class Scalar>
Scalar jack_at_ones(const Partition& lambda, const JackTable<Scalar>& table);

/// m_p(xi), xi of length >= p.length().
template <class Scalar>
Scalar monomial_eval(const Partition& p, std::span<const Scalar> xi);

/// Product in the monomial-symmetric basis; both inputs must use that basis and
/// the same rank. Throws std::invalid_argument otherwise.
template <class Scalar>
SymPolynomial<Scalar> sym_multiply(const SymPolynomial<Scalar>& p, const SymPolynomial<Scalar>& r);

/// Re-expresses p in `target`; Jack conversions use `table` (alpha and rank must match).
template <class Scalar>
SymPolynomial<Scalar> basis_convert(const SymPolynomial<Scalar>& p, Basis target,
                                    const JackTable<Scalar>& table);

/// Point evaluation in either basis.
template <class Scalar>
Scalar sym_eval(const SymPolynomial<Scalar>& p, std::span<const Scalar> xi, const JackTable<Scalar>* table);

/// Elementary symmetric polynomial e_j = m_(1^j).
template <class Scalar>
SymPolynomial<Scalar> elementary(int j, int rank);

}  // namespace jcone
