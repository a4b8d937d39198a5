#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bomkl/kernels.hpp"
#include "bomkl/learners.hpp"
#include "bomkl/multi_kernel.hpp"
#include "bomkl/snapshot.hpp"

namespace bomkl {

// One declarative record drives a whole experiment; every field can be
// overridden from the command line.
struct RunConfig {
  std::string dataset_path;
  std::string dataset_name;           // defaults to the file stem
  size_t subsample = 0;               // 0 = use all instances
  uint64_t subsample_seed = 9917;     // fixes the instance subset per config
  bool scale_features = false;        // per-feature min-max, off by default

  Algorithm algorithm = Algorithm::kBomkcSpa;
  std::vector<KernelSpec> kernels;    // empty = predefined 16-kernel pool
  bool normalize_kernels = false;

  SpaParams spa;                      // eta=0.1, alpha=1, beta=3
  BudgetParams budget;
  double gamma = 0.99;
  double delta = 0.001;
  std::string hedge_loss;             // "", "hinge" or "mistake"; "" = per-algorithm default
  bool hedge_update_all = true;       // false: update only sampled kernels (ablation)

  size_t reps = 10;
  uint64_t seed = 42;
  std::string out_dir = ".";
  std::string format = "csv";         // csv | json

  std::vector<KernelSpec> kernel_pool() const {
    if (kernels.empty()) return default_pool(normalize_kernels);
    if (!normalize_kernels) return kernels;
    std::vector<KernelSpec> pool = kernels;
    for (auto& k : pool) k.normalized = true;
    return pool;
  }

  RoundPolicy round_policy() const {
    RoundPolicy p = RoundPolicy::for_algorithm(algorithm);
    if (hedge_loss == "hinge") p.hedge_loss = HedgeLoss::kHinge;
    else if (hedge_loss == "mistake") p.hedge_loss = HedgeLoss::kMistake;
    else if (!hedge_loss.empty())
      throw std::invalid_argument("hedge_loss must be 'hinge' or 'mistake'");
    p.update_all_weights = hedge_update_all;
    return p;
  }

  void validate() const {
    if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
    if (format != "csv" && format != "json")
      throw std::invalid_argument("config: format must be 'csv' or 'json'");
    spa.validate();
    budget.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("config: gamma in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta in (0,1)");
    round_policy();
  }
};

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    cfg.dataset_path = d.value("path", "");
    cfg.dataset_name = d.value("name", "");
    cfg.subsample = d.value("subsample", size_t{0});
    cfg.subsample_seed = d.value("subsample_seed", cfg.subsample_seed);
    cfg.scale_features = d.value("scale", false);
  }
  if (j.contains("algorithm")) cfg.algorithm = algorithm_from_string(j.at("algorithm"));
  if (j.contains("kernels"))
    for (const auto& k : j.at("kernels")) cfg.kernels.push_back(kernel_from_json(k));
  cfg.normalize_kernels = j.value("normalize_kernels", false);
  if (j.contains("spa")) {
    const auto& s = j.at("spa");
    cfg.spa.eta = s.value("eta", cfg.spa.eta);
    cfg.spa.alpha = s.value("alpha", cfg.spa.alpha);
    cfg.spa.beta = s.value("beta", cfg.spa.beta);
  }
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    cfg.budget.budget = b.value("B", cfg.budget.budget);
    cfg.budget.bogd_step = b.value("bogd_step", cfg.budget.bogd_step);
    cfg.budget.bogd_lambda = b.value("bogd_lambda", cfg.budget.bogd_lambda);
    cfg.budget.bogd_max_coef = b.value("bogd_max_coef", cfg.budget.bogd_max_coef);
    cfg.budget.bpas_c = b.value("bpas_c", cfg.budget.bpas_c);
    cfg.budget.forgetron_shrink = b.value("forgetron_shrink", cfg.budget.forgetron_shrink);
  }
  if (j.contains("hedge")) {
    const auto& h = j.at("hedge");
    cfg.gamma = h.value("gamma", cfg.gamma);
    cfg.delta = h.value("delta", cfg.delta);
    cfg.hedge_loss = h.value("loss", cfg.hedge_loss);
    cfg.hedge_update_all = h.value("update_all", cfg.hedge_update_all);
  }
  cfg.reps = j.value("reps", cfg.reps);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.format = j.value("format", cfg.format);
  cfg.validate();
  return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"path", cfg.dataset_path},
                  {"name", cfg.dataset_name},
                  {"subsample", cfg.subsample},
                  {"subsample_seed", cfg.subsample_seed},
                  {"scale", cfg.scale_features}};
  j["algorithm"] = to_string(cfg.algorithm);
  if (!cfg.kernels.empty()) {
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : cfg.kernels) ks.push_back(kernel_to_json(k));
    j["kernels"] = ks;
  }
  j["normalize_kernels"] = cfg.normalize_kernels;
  j["spa"] = {{"eta", cfg.spa.eta}, {"alpha", cfg.spa.alpha}, {"beta", cfg.spa.beta}};
  j["budget"] = {{"B", cfg.budget.budget},
                 {"bogd_step", cfg.budget.bogd_step},
                 {"bogd_lambda", cfg.budget.bogd_lambda},
                 {"bpas_c", cfg.budget.bpas_c},
                 {"forgetron_shrink", cfg.budget.forgetron_shrink}};
  j["hedge"] = {{"gamma", cfg.gamma},
                {"delta", cfg.delta},
                {"loss", cfg.hedge_loss},
                {"update_all", cfg.hedge_update_all}};
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["format"] = cfg.format;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace bomkl
