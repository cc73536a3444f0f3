#include "jcone/partition.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace jcone {

Partition::Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw std::invalid_argument("partition parts must be nonnegative");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw std::invalid_argument("partition parts must be weakly decreasing");
  }
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (int v : parts_) weight_ += v;
}

std::vector<int> Partition::padded(int n) const {
  if (n < length()) throw std::invalid_argument("partition longer than requested padding");
  std::vector<int> out(parts_);
  out.resize(static_cast<std::size_t>(n), 0);
  return out;
}

Partition Partition::conjugate() const {
  std::vector<int> cols;
  int first = empty() ? 0 : parts_.front();
  for (int j = 0; j < first; ++j) {
    int c = 0;
    for (int v : parts_)
      if (v > j) ++c;
    cols.push_back(c);
  }
  return Partition(std::move(cols));
}

bool Partition::dominated_by(const Partition& other) const {
  if (weight_ != other.weight_) return false;
  int a = 0, b = 0;
  int n = std::max(length(), other.length());
  for (int i = 0; i < n; ++i) {
    a += (*this)[i];
    b += other[i];
    if (a > b) return false;
  }
  return true;
}

std::string Partition::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Partition& p) {
  os << '(';
  for (int i = 0; i < p.length(); ++i) os << (i ? "," : "") << p[i];
  return os << ')';
}

bool CanonicalOrder::operator()(const Partition& a, const Partition& b) const {
  if (a.weight() != b.weight()) return a.weight() < b.weight();
  int n = std::max(a.length(), b.length());
  for (int i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

std::vector<Partition> enumerate_partitions(int degree, int max_length) {
  if (degree < 0) throw std::invalid_argument("partition degree must be >= 0");
  if (max_length < 1) throw std::invalid_argument("partition length bound must be >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  // Largest first part first gives reverse lexicographic order.
  std::function<void(int, int)> rec = [&](int remaining, int cap) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) == max_length) return;
    for (int v = std::min(remaining, cap); v >= 1; --v) {
      cur.push_back(v);
      rec(remaining - v, v);
      cur.pop_back();
    }
  };
  rec(degree, degree);
  return out;
}

std::vector<Partition> enumerate_partitions_upto(int max_degree, int max_length) {
  std::vector<Partition> out;
  for (int k = 0; k <= max_degree; ++k) {
    auto block = enumerate_partitions(k, max_length);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<std::vector<int>> distinct_permutations(const Partition& p, int n) {
  std::vector<int> v = p.padded(n);
  std::sort(v.begin(), v.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

long monomial_count(const Partition& p, int n) {
  std::vector<int> v = p.padded(n);
  long total = 1;
  for (int i = 2; i <= n; ++i) total *= i;
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    for (std::size_t f = 2; f <= j - i; ++f) total /= static_cast<long>(f);
    i = j;
  }
  return total;
}

}  // namespace jcone
