#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bomkl/sparse_vector.hpp"

namespace bomkl {

// One kernel function: polynomial (x.y)^p or gaussian exp(-||x-y||^2/(2s^2)).
// The optional cosine-style normalization k/sqrt(k(x,x)k(y,y)) is off by
// default and only used for theory-matching experiments.
struct KernelSpec {
  enum class Kind { kPolynomial, kGaussian };

  Kind kind = Kind::kGaussian;
  int degree = 1;        // polynomial only, >= 1
  double sigma = 1.0;    // gaussian only, > 0
  bool normalized = false;

  static KernelSpec polynomial(int degree, bool normalized = false) {
    if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
    KernelSpec k;
    k.kind = Kind::kPolynomial;
    k.degree = degree;
    k.normalized = normalized;
    return k;
  }

  static KernelSpec gaussian(double sigma, bool normalized = false) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel: sigma must be > 0");
    KernelSpec k;
    k.kind = Kind::kGaussian;
    k.sigma = sigma;
    k.normalized = normalized;
    return k;
  }

  std::string describe() const {
    if (kind == Kind::kPolynomial) return "poly(p=" + std::to_string(degree) + ")";
    return "gauss(sigma=" + std::to_string(sigma) + ")";
  }
};

namespace detail {

inline double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace detail

// Kernel value from cached self dot products and one merged dot product.
// This is the hot path of the whole library.
inline double kernel_eval_cached(const KernelSpec& k, double a_self, double b_self,
                                 double ab_dot) {
  if (k.kind == KernelSpec::Kind::kPolynomial) {
    double v = detail::int_pow(ab_dot, k.degree);
    if (k.normalized) {
      double denom = std::sqrt(detail::int_pow(a_self, k.degree) *
                               detail::int_pow(b_self, k.degree));
      return denom > 0.0 ? v / denom : 0.0;
    }
    return v;
  }
  double d2 = squared_distance(a_self, b_self, ab_dot);
  return std::exp(-d2 / (2.0 * k.sigma * k.sigma));  // normalized form is identical
}

inline double kernel_eval(const KernelSpec& k, const SparseVector& a, const SparseVector& b) {
  return kernel_eval_cached(k, self_dot(a), self_dot(b), dot(a, b));
}

// k(x,x): exactly 1 for gaussian, <x,x>^p for polynomial (0 at x = 0; callers
// must handle the zero denominator).
inline double self_similarity_cached(const KernelSpec& k, double a_self) {
  if (k.kind == KernelSpec::Kind::kGaussian) return 1.0;
  if (k.normalized) return a_self > 0.0 ? 1.0 : 0.0;
  return detail::int_pow(a_self, k.degree);
}

inline double self_similarity(const KernelSpec& k, const SparseVector& a) {
  return self_similarity_cached(k, self_dot(a));
}

// The predefined 16-kernel pool: polynomial p in {1,2,3}, then gaussian
// sigma in {2^-6, ..., 2^6}, in this canonical order.
inline std::vector<KernelSpec> default_pool(bool normalized = false) {
  std::vector<KernelSpec> pool;
  pool.reserve(16);
  for (int p = 1; p <= 3; ++p) pool.push_back(KernelSpec::polynomial(p, normalized));
  for (int e = -6; e <= 6; ++e)
    pool.push_back(KernelSpec::gaussian(std::ldexp(1.0, e), normalized));
  return pool;
}

}  // namespace bomkl
