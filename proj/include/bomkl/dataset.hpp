#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <zlib.h>

#include "bomkl/prng.hpp"
#include "bomkl/sparse_vector.hpp"

namespace bomkl {

struct Instance {
  SparseVector features;
  int label = 0;  // -1 or +1
  double self_dot = 0.0;  // cached <x,x>, filled on construction

  Instance() = default;
  Instance(SparseVector f, int y)
      : features(std::move(f)), label(y), self_dot(bomkl::self_dot(features)) {}
};

struct Dataset {
  std::vector<Instance> instances;
  uint32_t dim = 0;
  std::string name;

  size_t size() const { return instances.size(); }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps two distinct raw label values onto {-1,+1}: larger raw value -> +1.
// Raw labels already in {-1,+1} pass through unchanged.
inline std::map<double, int> normalize_labels(const std::vector<double>& raw) {
  std::set<double> distinct(raw.begin(), raw.end());
  bool already_binary = true;
  for (double v : distinct)
    if (v != -1.0 && v != 1.0) already_binary = false;
  if (already_binary && distinct.size() <= 2) {
    std::map<double, int> m;
    for (double v : distinct) m[v] = v > 0 ? +1 : -1;
    return m;
  }
  if (distinct.size() != 2)
    throw std::runtime_error("normalize_labels: expected exactly two distinct labels, got " +
                             std::to_string(distinct.size()));
  std::map<double, int> m;
  m[*distinct.begin()] = -1;
  m[*std::next(distinct.begin())] = +1;
  return m;
}

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

inline std::string read_file(const std::string& path) {
  // zlib reads plain files transparently, but only .gz paths are treated as
  // compressed so that a missing file is reported on open either way.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open dataset file: " + path);
  std::string content;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<size_t>(n));
  if (n < 0) {
    gzclose(f);
    throw std::runtime_error("error while reading dataset file: " + path);
  }
  gzclose(f);
  return content;
}

}  // namespace detail

// Parses LIBSVM sparse text: `<label> <idx>:<val> ...` per nonempty line,
// indices ascending. Raw labels are mapped to {-1,+1} by normalize_labels.
inline Dataset parse_libsvm(const std::string& text, const std::string& name = "") {
  Dataset ds;
  ds.name = name;
  std::vector<double> raw_labels;
  std::vector<SparseVector> features;

  size_t line_no = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) continue;  // blank line

    double label;
    if (!detail::parse_double(tok, label))
      throw ParseError("line " + std::to_string(line_no) + ": bad label '" + tok + "'");

    SparseVector vec;
    uint32_t prev_index = 0;
    while (fields >> tok) {
      size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad feature '" + tok + "'");
      double idx_val, val;
      if (!detail::parse_double(tok.substr(0, colon), idx_val) || idx_val < 1.0 ||
          idx_val != std::floor(idx_val))
        throw ParseError("line " + std::to_string(line_no) + ": bad feature index in '" + tok + "'");
      if (!detail::parse_double(tok.substr(colon + 1), val))
        throw ParseError("line " + std::to_string(line_no) + ": bad feature value in '" + tok + "'");
      uint32_t idx = static_cast<uint32_t>(idx_val);
      if (idx <= prev_index)
        throw ParseError("line " + std::to_string(line_no) + ": feature indices not ascending");
      prev_index = idx;
      vec.push_back(idx, val);
      ds.dim = std::max(ds.dim, idx);
    }
    raw_labels.push_back(label);
    features.push_back(std::move(vec));
  }

  if (!raw_labels.empty()) {
    auto mapping = normalize_labels(raw_labels);
    ds.instances.reserve(features.size());
    for (size_t i = 0; i < features.size(); ++i)
      ds.instances.emplace_back(std::move(features[i]), mapping.at(raw_labels[i]));
  }
  return ds;
}

inline Dataset load_libsvm_file(const std::string& path, const std::string& name = "") {
  std::string n = name;
  if (n.empty()) {
    size_t slash = path.find_last_of('/');
    n = slash == std::string::npos ? path : path.substr(slash + 1);
    if (n.size() > 3 && n.substr(n.size() - 3) == ".gz") n = n.substr(0, n.size() - 3);
  }
  return parse_libsvm(detail::read_file(path), n);
}

// Canonical text form; parse(serialize(ds)) == ds.
inline std::string serialize_libsvm(const Dataset& ds) {
  std::ostringstream out;
  for (const Instance& inst : ds.instances) {
    out << (inst.label > 0 ? "+1" : "-1");
    for (const auto& e : inst.features.entries()) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), " %u:%.17g", e.index, e.value);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// Order-only view of a dataset; instances are not copied.
class PermutedView {
 public:
  PermutedView(const Dataset& ds, std::vector<size_t> order)
      : ds_(ds), order_(std::move(order)) {
    if (order_.size() != ds_.size())
      throw std::invalid_argument("PermutedView: ordering length != dataset size");
  }

  size_t size() const { return order_.size(); }
  const Instance& operator[](size_t k) const { return ds_.instances[order_[k]]; }

  class iterator {
   public:
    iterator(const PermutedView* view, size_t pos) : view_(view), pos_(pos) {}
    const Instance& operator*() const { return (*view_)[pos_]; }
    iterator& operator++() { ++pos_; return *this; }
    bool operator!=(const iterator& other) const { return pos_ != other.pos_; }

   private:
    const PermutedView* view_;
    size_t pos_;
  };

  iterator begin() const { return iterator(this, 0); }
  iterator end() const { return iterator(this, order_.size()); }

 private:
  const Dataset& ds_;
  std::vector<size_t> order_;
};

// Two Gaussian blobs with unit variance centered at +-(separation/2)*e1.
// Labels alternate so the unpermuted stream is balanced.
inline Dataset synth_two_blobs(size_t n_per_class, double separation, uint32_t dim,
                               RngStream& rng) {
  if (n_per_class < 1 || dim < 1 || separation < 0)
    throw std::invalid_argument("synth_two_blobs: bad parameters");
  auto next_gaussian = [&rng]() {
    double u1 = 1.0 - rng.next_uniform();  // (0,1], keeps log finite
    double u2 = rng.next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  Dataset ds;
  ds.name = "two-blobs";
  ds.dim = dim;
  ds.instances.reserve(2 * n_per_class);
  for (size_t k = 0; k < 2 * n_per_class; ++k) {
    int label = (k % 2 == 0) ? +1 : -1;
    double center = label * separation / 2.0;
    SparseVector vec;
    for (uint32_t d = 1; d <= dim; ++d) {
      double v = next_gaussian() + (d == 1 ? center : 0.0);
      vec.push_back(d, v);
    }
    ds.instances.emplace_back(std::move(vec), label);
  }
  return ds;
}

// Per-feature min-max scaling to [0,1], implicit zeros included in the
// min/max. Off by default in the harness; densifies features whose minimum
// is nonzero.
inline Dataset scale_min_max(const Dataset& ds) {
  if (ds.instances.empty()) return ds;
  const uint32_t dim = ds.dim;
  std::vector<double> mn(dim + 1, 0.0), mx(dim + 1, 0.0);
  std::vector<size_t> seen(dim + 1, 0);
  for (const Instance& inst : ds.instances)
    for (const auto& e : inst.features.entries()) {
      if (seen[e.index]++ == 0) {
        mn[e.index] = e.value;
        mx[e.index] = e.value;
      } else {
        mn[e.index] = std::min(mn[e.index], e.value);
        mx[e.index] = std::max(mx[e.index], e.value);
      }
    }
  for (uint32_t d = 1; d <= dim; ++d)
    if (seen[d] < ds.instances.size()) {  // implicit zeros present
      mn[d] = std::min(mn[d], 0.0);
      mx[d] = std::max(mx[d], 0.0);
    }

  Dataset out;
  out.dim = ds.dim;
  out.name = ds.name;
  out.instances.reserve(ds.size());
  for (const Instance& inst : ds.instances) {
    SparseVector vec;
    size_t next = 0;
    const auto& entries = inst.features.entries();
    for (uint32_t d = 1; d <= dim; ++d) {
      double raw = 0.0;
      if (next < entries.size() && entries[next].index == d) raw = entries[next++].value;
      double range = mx[d] - mn[d];
      if (range <= 0.0) continue;  // constant feature
      double v = (raw - mn[d]) / range;
      if (v != 0.0) vec.push_back(d, v);
    }
    out.instances.emplace_back(std::move(vec), inst.label);
  }
  return out;
}

// Seeded subsample of n instances without replacement, file order preserved.
inline Dataset subsample(const Dataset& ds, size_t n, RngStream& rng) {
  if (n >= ds.size()) return ds;
  std::vector<size_t> order = rng.permutation(ds.size());
  order.resize(n);
  std::sort(order.begin(), order.end());
  Dataset out;
  out.dim = ds.dim;
  out.name = ds.name;
  out.instances.reserve(n);
  for (size_t idx : order) out.instances.push_back(ds.instances[idx]);
  return out;
}

}  // namespace bomkl
