#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bomkl/classifier.hpp"

namespace bomkl {

// Versioned JSON snapshot of classifier state (kernel spec + SV list) for
// resuming runs. Version 1.

inline nlohmann::json kernel_to_json(const KernelSpec& k) {
  nlohmann::json j;
  if (k.kind == KernelSpec::Kind::kPolynomial) {
    j["kind"] = "polynomial";
    j["degree"] = k.degree;
  } else {
    j["kind"] = "gaussian";
    j["sigma"] = k.sigma;
  }
  if (k.normalized) j["normalized"] = true;
  return j;
}

inline KernelSpec kernel_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  bool normalized = j.value("normalized", false);
  if (kind == "polynomial") return KernelSpec::polynomial(j.at("degree").get<int>(), normalized);
  if (kind == "gaussian") return KernelSpec::gaussian(j.at("sigma").get<double>(), normalized);
  throw std::invalid_argument("unknown kernel kind: " + kind);
}

inline nlohmann::json classifier_to_json(const KernelClassifier& c) {
  nlohmann::json j;
  j["kernel"] = kernel_to_json(c.kernel());
  nlohmann::json svs = nlohmann::json::array();
  for (const SupportVector& sv : c.svs()) {
    nlohmann::json point = nlohmann::json::array();
    for (const auto& e : sv.point.entries()) point.push_back({e.index, e.value});
    svs.push_back({{"coef", sv.coef}, {"round", sv.arrival_round}, {"point", point}});
  }
  j["svs"] = svs;
  return j;
}

inline KernelClassifier classifier_from_json(const nlohmann::json& j) {
  KernelClassifier c(kernel_from_json(j.at("kernel")));
  for (const auto& sv : j.at("svs")) {
    SparseVector point;
    for (const auto& e : sv.at("point"))
      point.push_back(e.at(0).get<uint32_t>(), e.at(1).get<double>());
    c.add_sv(point, sv.at("coef").get<double>(), sv.at("round").get<size_t>());
  }
  return c;
}

inline nlohmann::json snapshot_to_json(const CombinedClassifier& cc) {
  cc.validate();
  nlohmann::json j;
  j["version"] = 1;
  j["theta"] = cc.theta;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : cc.components) comps.push_back(classifier_to_json(c));
  j["components"] = comps;
  return j;
}

inline CombinedClassifier snapshot_from_json(const nlohmann::json& j) {
  int version = j.at("version").get<int>();
  if (version != 1)
    throw std::runtime_error("unsupported snapshot version: " + std::to_string(version));
  CombinedClassifier cc;
  cc.theta = j.at("theta").get<std::vector<double>>();
  for (const auto& c : j.at("components")) cc.components.push_back(classifier_from_json(c));
  cc.validate();
  return cc;
}

inline void save_snapshot(const CombinedClassifier& cc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot: " + path);
  out << snapshot_to_json(cc).dump(2) << '\n';
}

inline CombinedClassifier load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read snapshot: " + path);
  nlohmann::json j;
  in >> j;
  return snapshot_from_json(j);
}

}  // namespace bomkl
