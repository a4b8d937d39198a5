#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bomkl/dataset.hpp"
#include "bomkl/kernels.hpp"
#include "bomkl/sparse_vector.hpp"

namespace bomkl {

inline double hinge(double margin, int y) {
  if (y != -1 && y != 1) throw std::invalid_argument("hinge: label must be -1 or +1");
  double l = 1.0 - y * margin;
  return l > 0.0 ? l : 0.0;
}

// sign(0) is +1 so that every run breaks ties identically.
inline int predict_sign(double margin) { return margin >= 0.0 ? +1 : -1; }

struct SupportVector {
  double coef = 0.0;         // signed coefficient (tau*y folded together)
  SparseVector point;
  double self_dot = 0.0;     // cached <x,x>
  size_t arrival_round = 0;
};

// Kernel expansion f(x) = sum_j coef_j * k(point_j, x). Append-only for SPA;
// budget learners use the eviction hooks.
class KernelClassifier {
 public:
  KernelClassifier() = default;
  explicit KernelClassifier(KernelSpec kernel) : kernel_(std::move(kernel)) {}

  const KernelSpec& kernel() const { return kernel_; }
  const std::vector<SupportVector>& svs() const { return svs_; }
  size_t sv_count() const { return svs_.size(); }

  double margin(const SparseVector& x, double x_self) const {
    double sum = 0.0;
    for (const SupportVector& sv : svs_)
      sum += sv.coef * kernel_eval_cached(kernel_, sv.self_dot, x_self, dot(sv.point, x));
    return sum;
  }

  double margin(const SparseVector& x) const { return margin(x, self_dot(x)); }
  double margin(const Instance& inst) const { return margin(inst.features, inst.self_dot); }

  // Margin plus the per-SV kernel row k(point_j, x); the row is what budget
  // replacement scoring needs, computing it alongside avoids a second pass.
  double margin_and_row(const SparseVector& x, double x_self, std::vector<double>& row) const {
    row.resize(svs_.size());
    double sum = 0.0;
    for (size_t j = 0; j < svs_.size(); ++j) {
      row[j] = kernel_eval_cached(kernel_, svs_[j].self_dot, x_self, dot(svs_[j].point, x));
      sum += svs_[j].coef * row[j];
    }
    return sum;
  }

  void add_sv(const SparseVector& x, double x_self, double coef, size_t round) {
    if (!std::isfinite(coef)) throw std::invalid_argument("add_sv: coefficient must be finite");
    svs_.push_back({coef, x, x_self, round});
  }

  void add_sv(const SparseVector& x, double coef, size_t round) {
    add_sv(x, self_dot(x), coef, round);
  }

  void scale_coefs(double factor) {
    for (SupportVector& sv : svs_) sv.coef *= factor;
  }

  void set_coef(size_t index, double coef) { svs_.at(index).coef = coef; }

  void remove_sv(size_t index) {
    if (index >= svs_.size()) throw std::out_of_range("remove_sv: bad index");
    svs_.erase(svs_.begin() + static_cast<ptrdiff_t>(index));
  }

  void remove_oldest() { remove_sv(0); }

 private:
  KernelSpec kernel_;
  std::vector<SupportVector> svs_;
};

// Simplex-weighted combination f(x) = sum_i theta_i f_i(x).
struct CombinedClassifier {
  std::vector<KernelClassifier> components;
  std::vector<double> theta;

  void validate() const {
    if (components.size() != theta.size())
      throw std::invalid_argument("CombinedClassifier: component/theta size mismatch");
    double sum = 0.0;
    for (double t : theta) {
      if (t < 0.0) throw std::invalid_argument("CombinedClassifier: negative weight");
      sum += t;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("CombinedClassifier: weights must sum to 1");
  }
};

inline double combined_margin(const CombinedClassifier& cc, const SparseVector& x) {
  cc.validate();
  double x_self = self_dot(x);
  double sum = 0.0;
  for (size_t i = 0; i < cc.components.size(); ++i)
    sum += cc.theta[i] * cc.components[i].margin(x, x_self);
  return sum;
}

}  // namespace bomkl
