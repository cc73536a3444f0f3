#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace jcone {

/// Weakly decreasing tuple of positive integers (trailing zeros are dropped).
class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> parts);
  explicit Partition(std::vector<int> parts);

  int weight() const { return weight_; }
  int length() const { return static_cast<int>(parts_.size()); }
  bool empty() const { return parts_.empty(); }

  /// Part i (0-based); zero past the length.
  int operator[](int i) const { return i < length() ? parts_[static_cast<std::size_t>(i)] : 0; }
  const std::vector<int>& parts() const { return parts_; }

  /// Parts padded with zeros to exactly n entries (n >= length()).
  std::vector<int> padded(int n) const;

  /// Conjugate partition (column lengths of the Young diagram).
  Partition conjugate() const;

  /// True if this partition is <= other in dominance order (equal weights).
  bool dominated_by(const Partition& other) const;

  std::string str() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

/// Canonical index order used everywhere: by weight ascending, then reverse
/// lexicographic within a weight ((k) first, (1,...,1) last).
struct CanonicalOrder {
  bool operator()(const Partition& a, const Partition& b) const;
};

/// All partitions of `degree` with at most `max_length` parts, reverse lexicographic.
std::vector<Partition> enumerate_partitions(int degree, int max_length);

/// All partitions of weight <= max_degree with at most max_length parts, canonical order.
std::vector<Partition> enumerate_partitions_upto(int max_degree, int max_length);

/// Distinct permutations of the zero-padded exponent vector of `p` in n variables.
std::vector<std::vector<int>> distinct_permutations(const Partition& p, int n);

/// Number of distinct permutations, i.e. m_p(1,...,1) in n variables.
long monomial_count(const Partition& p, int n);

std::ostream& operator<<(std::ostream& os, const Partition& p);

}  // namespace jcone
