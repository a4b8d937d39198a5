#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bomkl {

// Sparse feature vector: (index, value) entries with strictly increasing
// 1-based indices and no stored zeros.
class SparseVector {
 public:
  struct Entry {
    uint32_t index;  // 1-based
    double value;
  };

  SparseVector() = default;

  explicit SparseVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
    uint32_t prev = 0;
    for (const Entry& e : entries_) {
      if (e.index == 0 || e.index <= prev)
        throw std::invalid_argument("SparseVector: indices must be strictly increasing and >= 1");
      prev = e.index;
    }
    strip_zeros();
  }

  // Appends an entry; index must exceed the last stored index. Zero values
  // are dropped to keep the canonical form.
  void push_back(uint32_t index, double value) {
    if (index == 0 || (!entries_.empty() && index <= entries_.back().index))
      throw std::invalid_argument("SparseVector: indices must be strictly increasing and >= 1");
    if (value != 0.0) entries_.push_back({index, value});
  }

  const std::vector<Entry>& entries() const { return entries_; }
  size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  uint32_t max_index() const { return entries_.empty() ? 0 : entries_.back().index; }

  bool operator==(const SparseVector& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].index != other.entries_[i].index ||
          entries_[i].value != other.entries_[i].value)
        return false;
    return true;
  }

 private:
  void strip_zeros() {
    size_t out = 0;
    for (const Entry& e : entries_)
      if (e.value != 0.0) entries_[out++] = e;
    entries_.resize(out);
  }

  std::vector<Entry> entries_;
};

// Merge over sorted indices; dominates total runtime, keep it lean.
inline double dot(const SparseVector& a, const SparseVector& b) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].index < eb[j].index) {
      ++i;
    } else if (ea[i].index > eb[j].index) {
      ++j;
    } else {
      sum += ea[i].value * eb[j].value;
      ++i;
      ++j;
    }
  }
  return sum;
}

inline double self_dot(const SparseVector& a) {
  double sum = 0.0;
  for (const auto& e : a.entries()) sum += e.value * e.value;
  return sum;
}

// ||a - b||^2 from cached norms: <a,a> + <b,b> - 2<a,b>. Clamped at zero
// against cancellation on near-identical vectors.
inline double squared_distance(double a_self, double b_self, double ab_dot) {
  double d = a_self + b_self - 2.0 * ab_dot;
  return d > 0.0 ? d : 0.0;
}

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
  return squared_distance(self_dot(a), self_dot(b), dot(a, b));
}

}  // namespace bomkl
