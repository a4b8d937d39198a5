#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bomkl/learners.hpp"

namespace bomkl {

// Multiplicative-weights state in the log domain; w_i never over/underflows
// even after millions of loss-1 rounds.
struct HedgeState {
  std::vector<double> log_w;
  double gamma = 0.99;   // in (0,1)
  double delta = 0.001;  // in (0,1)

  HedgeState() = default;
  HedgeState(size_t m, double gamma_, double delta_) : gamma(gamma_), delta(delta_) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("HedgeState: gamma in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("HedgeState: delta in (0,1)");
    if (m == 0) throw std::invalid_argument("HedgeState: empty kernel pool");
    log_w.assign(m, -std::log(static_cast<double>(m)));  // w_1^i = 1/m
  }

  size_t size() const { return log_w.size(); }
};

// p_i = (1-delta) * w_i / max_j w_j + delta, computed in the log domain.
inline double sampling_prob(const HedgeState& h, size_t i) {
  double max_lw = *std::max_element(h.log_w.begin(), h.log_w.end());
  return (1.0 - h.delta) * std::exp(h.log_w[i] - max_lw) + h.delta;
}

// w_i <- w_i * gamma^{loss_i}, applied to every kernel.
inline void hedge_update(HedgeState& h, const std::vector<double>& losses) {
  if (losses.size() != h.size()) throw std::invalid_argument("hedge_update: size mismatch");
  double lg = std::log(h.gamma);
  for (size_t i = 0; i < h.size(); ++i) {
    if (!(losses[i] >= 0.0) || !std::isfinite(losses[i]))
      throw std::invalid_argument("hedge_update: losses must be finite and >= 0");
    h.log_w[i] += losses[i] * lg;
  }
}

// theta_i = w_i / sum_j w_j via log-sum-exp.
inline std::vector<double> normalize(const HedgeState& h) {
  double max_lw = *std::max_element(h.log_w.begin(), h.log_w.end());
  double sum = 0.0;
  for (double lw : h.log_w) sum += std::exp(lw - max_lw);
  double lse = max_lw + std::log(sum);
  std::vector<double> theta(h.size());
  for (size_t i = 0; i < h.size(); ++i) theta[i] = std::exp(h.log_w[i] - lse);
  return theta;
}

enum class Algorithm {
  kBomkcSpa,
  kOmkcU,
  kOmkcDD,
  kOmkcSD,
  kBomkcRbp,
  kBomkcForgetron,
  kBomkcBogd,
  kBomkcBpas,
};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBomkcSpa: return "bomkc_spa";
    case Algorithm::kOmkcU: return "omkc_u";
    case Algorithm::kOmkcDD: return "omkc_dd";
    case Algorithm::kOmkcSD: return "omkc_sd";
    case Algorithm::kBomkcRbp: return "bomkc_rbp";
    case Algorithm::kBomkcForgetron: return "bomkc_forgetron";
    case Algorithm::kBomkcBogd: return "bomkc_bogd";
    case Algorithm::kBomkcBpas: return "bomkc_bpas";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "bomkc_spa" || s == "spa") return Algorithm::kBomkcSpa;
  if (s == "omkc_u") return Algorithm::kOmkcU;
  if (s == "omkc_dd") return Algorithm::kOmkcDD;
  if (s == "omkc_sd") return Algorithm::kOmkcSD;
  if (s == "bomkc_rbp" || s == "rbp") return Algorithm::kBomkcRbp;
  if (s == "bomkc_forgetron" || s == "forgetron") return Algorithm::kBomkcForgetron;
  if (s == "bomkc_bogd" || s == "bogd") return Algorithm::kBomkcBogd;
  if (s == "bomkc_bpas" || s == "bpas") return Algorithm::kBomkcBpas;
  throw std::invalid_argument("unknown algorithm: " + s);
}

enum class HedgeLoss { kHinge, kMistake };

// Per-algorithm wiring of the round loop.
struct RoundPolicy {
  LearnerKind learner = LearnerKind::kSpa;
  bool gated_updates = false;        // kernel i updates only when c_t^i = 1
  bool uniform_prediction = false;   // OMKC(U): fixed uniform combination
  HedgeLoss hedge_loss = HedgeLoss::kHinge;
  bool update_all_weights = true;    // false: ablation, update sampled kernels only

  static RoundPolicy for_algorithm(Algorithm a) {
    RoundPolicy p;
    switch (a) {
      case Algorithm::kBomkcSpa:
        p.learner = LearnerKind::kSpa;
        p.gated_updates = true;
        break;
      case Algorithm::kOmkcU:
        p.learner = LearnerKind::kPerceptron;
        p.uniform_prediction = true;
        p.hedge_loss = HedgeLoss::kMistake;
        break;
      case Algorithm::kOmkcDD:
        p.learner = LearnerKind::kPerceptron;
        p.hedge_loss = HedgeLoss::kMistake;
        break;
      case Algorithm::kOmkcSD:
        p.learner = LearnerKind::kPerceptron;
        p.gated_updates = true;
        p.hedge_loss = HedgeLoss::kMistake;
        break;
      case Algorithm::kBomkcRbp: p.learner = LearnerKind::kRbp; break;
      case Algorithm::kBomkcForgetron: p.learner = LearnerKind::kForgetron; break;
      case Algorithm::kBomkcBogd: p.learner = LearnerKind::kBogd; break;
      case Algorithm::kBomkcBpas: p.learner = LearnerKind::kBpas; break;
    }
    return p;
  }
};

struct RoundResult {
  int predicted = +1;
  bool mistake = false;
  double combined_margin = 0.0;
  double combined_loss = 0.0;      // hinge of the combined prediction
  double min_kernel_loss = 0.0;    // smallest per-kernel hinge loss this round
  size_t svs_added = 0;
};

// The online round loop shared by BOMKC(SPA), OMKC(U/DD/SD) and the
// budget-OMKC wrappers. Prediction uses the weights normalized at the end of
// the previous round; per-kernel Hedge losses are evaluated at the
// pre-update classifiers.
class MultiKernelModel {
 public:
  MultiKernelModel(const std::vector<KernelSpec>& pool, Algorithm algo, const SpaParams& spa,
                   const BudgetParams& budget, double gamma, double delta, uint64_t seed,
                   RoundPolicy policy)
      : algo_(algo), policy_(policy), hedge_(pool.size(), gamma, delta) {
    learners_.reserve(pool.size());
    c_streams_.reserve(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      RngStream learner_stream(seed, policy_.learner == LearnerKind::kSpa
                                         ? stream::id(stream::kSampleZ, i)
                                         : stream::id(stream::kEvict, i));
      learners_.emplace_back(pool[i], policy_.learner, spa, budget, spa.eta, learner_stream);
      c_streams_.emplace_back(seed, stream::id(stream::kSampleC, i));
    }
    theta_ = normalize(hedge_);
  }

  MultiKernelModel(const std::vector<KernelSpec>& pool, Algorithm algo, const SpaParams& spa,
                   const BudgetParams& budget, double gamma, double delta, uint64_t seed)
      : MultiKernelModel(pool, algo, spa, budget, gamma, delta, seed,
                         RoundPolicy::for_algorithm(algo)) {}

  RoundResult round(const Instance& inst) {
    const size_t m = learners_.size();
    margins_.resize(m);
    losses_.resize(m);
    hedge_losses_.resize(m);
    for (size_t i = 0; i < m; ++i) {
      margins_[i] = learners_[i].classifier().margin(inst);
      losses_[i] = hinge(margins_[i], inst.label);
      hedge_losses_[i] = policy_.hedge_loss == HedgeLoss::kHinge
                             ? losses_[i]
                             : (predict_sign(margins_[i]) != inst.label ? 1.0 : 0.0);
    }

    RoundResult result;
    double combined = 0.0;
    if (policy_.uniform_prediction) {
      for (size_t i = 0; i < m; ++i) combined += margins_[i];
      combined /= static_cast<double>(m);
    } else {
      for (size_t i = 0; i < m; ++i) combined += theta_[i] * margins_[i];
    }
    result.combined_margin = combined;
    result.predicted = predict_sign(combined);
    result.mistake = result.predicted != inst.label;
    result.combined_loss = hinge(combined, inst.label);
    result.min_kernel_loss = m ? *std::min_element(losses_.begin(), losses_.end()) : 0.0;

    sampled_.assign(m, true);
    for (size_t i = 0; i < m; ++i) {
      if (policy_.gated_updates) {
        double p = sampling_prob(hedge_, i);
        sampled_[i] = c_streams_[i].bernoulli(p);
      }
      if (sampled_[i]) {
        size_t before = learners_[i].classifier().sv_count();
        learners_[i].step(inst, round_, margins_[i]);
        result.svs_added += learners_[i].classifier().sv_count() - before;
      }
    }

    if (policy_.update_all_weights) {
      hedge_update(hedge_, hedge_losses_);
    } else {
      partial_losses_ = hedge_losses_;
      for (size_t i = 0; i < m; ++i)
        if (!sampled_[i]) partial_losses_[i] = 0.0;
      hedge_update(hedge_, partial_losses_);
    }
    theta_ = normalize(hedge_);
    check_simplex();

    cumulative_mistakes_ += result.mistake ? 1 : 0;
    ++round_;
    return result;
  }

  const std::vector<SingleKernelLearner>& learners() const { return learners_; }
  const HedgeState& hedge() const { return hedge_; }
  const std::vector<double>& theta() const { return theta_; }
  Algorithm algorithm() const { return algo_; }
  size_t rounds() const { return round_; }
  size_t cumulative_mistakes() const { return cumulative_mistakes_; }
  const std::vector<double>& last_margins() const { return margins_; }
  const std::vector<double>& last_losses() const { return losses_; }

  size_t total_sv_count() const {
    size_t total = 0;
    for (const auto& l : learners_) total += l.classifier().sv_count();
    return total;
  }

  std::vector<size_t> per_kernel_sv_counts() const {
    std::vector<size_t> counts(learners_.size());
    for (size_t i = 0; i < learners_.size(); ++i) counts[i] = learners_[i].classifier().sv_count();
    return counts;
  }

  std::vector<size_t> per_kernel_update_counts() const {
    std::vector<size_t> counts(learners_.size());
    for (size_t i = 0; i < learners_.size(); ++i) counts[i] = learners_[i].update_count();
    return counts;
  }

  CombinedClassifier snapshot() const {
    CombinedClassifier cc;
    cc.theta = policy_.uniform_prediction
                   ? std::vector<double>(learners_.size(), 1.0 / learners_.size())
                   : theta_;
    for (const auto& l : learners_) cc.components.push_back(l.classifier());
    return cc;
  }

 private:
  void check_simplex() const {
    double sum = 0.0;
    for (double t : theta_) {
      BOMKL_CHECK(t >= 0.0, "theta nonnegative");
      sum += t;
    }
    BOMKL_CHECK(std::fabs(sum - 1.0) <= 1e-12, "theta sums to 1");
  }

  Algorithm algo_;
  RoundPolicy policy_;
  HedgeState hedge_;
  std::vector<SingleKernelLearner> learners_;
  std::vector<RngStream> c_streams_;
  std::vector<double> theta_;
  size_t round_ = 0;
  size_t cumulative_mistakes_ = 0;
  // round-loop scratch, kept to avoid per-round allocation
  std::vector<double> margins_, losses_, hedge_losses_, partial_losses_;
  std::vector<bool> sampled_;
};

}  // namespace bomkl
