#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bomkl/classifier.hpp"
#include "bomkl/prng.hpp"

namespace bomkl {

#define BOMKL_CHECK(cond, msg) \
  do {                         \
    if (!(cond)) throw std::logic_error(std::string("invariant violated: ") + (msg)); \
  } while (0)

struct SpaParams {
  double eta = 0.1;
  double alpha = 1.0;
  double beta = 3.0;

  void validate() const {
    if (!(alpha > 0.0) || !(beta >= alpha) || !(eta > 0.0))
      throw std::invalid_argument("SpaParams: require beta >= alpha > 0 and eta > 0");
  }
};

struct BudgetParams {
  size_t budget = 100;              // B >= 1
  double bogd_step = 0.1;
  double bogd_lambda = 1e-3;
  double bogd_max_coef = std::numeric_limits<double>::infinity();
  double bpas_c = 0.1;
  double forgetron_shrink = 0.9;    // in (0,1]; 1 = pure oldest-removal

  void validate() const {
    if (budget < 1) throw std::invalid_argument("BudgetParams: budget must be >= 1");
    if (!(bogd_step > 0.0) || bogd_lambda < 0.0)
      throw std::invalid_argument("BudgetParams: require bogd_step > 0 and bogd_lambda >= 0");
    if (!(bpas_c > 0.0)) throw std::invalid_argument("BudgetParams: require bpas_c > 0");
    if (!(forgetron_shrink > 0.0) || forgetron_shrink > 1.0)
      throw std::invalid_argument("BudgetParams: forgetron_shrink must be in (0,1]");
  }
};

struct StepOutcome {
  double margin = 0.0;
  double loss = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  bool z = false;
  bool updated = false;
  bool degenerate = false;  // k(x,x) = 0 with a pending update
};

namespace detail {

inline void check_tau(double tau, double cap, double kxx, double loss) {
  BOMKL_CHECK(tau >= 0.0 && tau <= cap * (1.0 + 1e-9), "tau within [0, eta/rho]");
  if (kxx > 0.0) BOMKL_CHECK(tau * kxx <= loss * (1.0 + 1e-9) + 1e-12, "tau*k(x,x) <= loss");
}

}  // namespace detail

// Plain passive-aggressive update: argmin 1/2 ||f - f_t||^2 + eta*l_t(f),
// i.e. tau = min(eta, loss / k(x,x)) along k(x_t, .).
inline StepOutcome pa_step(KernelClassifier& c, const Instance& inst, double eta,
                           size_t round, double margin) {
  if (!(eta > 0.0)) throw std::invalid_argument("pa_step: eta must be > 0");
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (out.loss <= 0.0) return out;
  out.rho = 1.0;
  out.z = true;
  double kxx = self_similarity_cached(c.kernel(), inst.self_dot);
  if (kxx <= 0.0) {
    out.degenerate = true;  // all-zero instance under a polynomial kernel
    return out;
  }
  out.tau = std::min(eta, out.loss / kxx);
  detail::check_tau(out.tau, eta, kxx, out.loss);
  c.add_sv(inst.features, inst.self_dot, out.tau * inst.label, round);
  out.updated = true;
  return out;
}

inline StepOutcome pa_step(KernelClassifier& c, const Instance& inst, double eta, size_t round) {
  return pa_step(c, inst, eta, round, c.margin(inst));
}

// Sparse passive-aggressive update: the PA step fires only with probability
// rho = min(alpha, loss)/beta, scaled by 1/rho to stay unbiased.
inline StepOutcome spa_step(KernelClassifier& c, const Instance& inst, const SpaParams& p,
                            RngStream& rng, size_t round, double margin) {
  p.validate();
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (out.loss <= 0.0) return out;  // rho = 0 implies z = 0 and z/rho = 0
  out.rho = std::min(p.alpha, out.loss) / p.beta;
  out.z = rng.bernoulli(out.rho);
  if (!out.z) return out;
  double kxx = self_similarity_cached(c.kernel(), inst.self_dot);
  double cap = p.eta / out.rho;
  if (kxx > 0.0) {
    out.tau = std::min(cap, out.loss / kxx);
  } else {
    out.tau = cap;  // denominator term dropped
    out.degenerate = true;
  }
  detail::check_tau(out.tau, cap, kxx, out.loss);
  c.add_sv(inst.features, inst.self_dot, out.tau * inst.label, round);
  out.updated = true;
  return out;
}

inline StepOutcome spa_step(KernelClassifier& c, const Instance& inst, const SpaParams& p,
                            RngStream& rng, size_t round) {
  return spa_step(c, inst, p, rng, round, c.margin(inst));
}

// Kernel perceptron: f <- f + y*k(x,.) whenever y*f(x) <= 0.
inline StepOutcome perceptron_step(KernelClassifier& c, const Instance& inst, size_t round,
                                   double margin) {
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (inst.label * margin > 0.0) return out;
  out.rho = 1.0;
  out.z = true;
  out.tau = 1.0;
  c.add_sv(inst.features, inst.self_dot, static_cast<double>(inst.label), round);
  out.updated = true;
  return out;
}

inline StepOutcome perceptron_step(KernelClassifier& c, const Instance& inst, size_t round) {
  return perceptron_step(c, inst, round, c.margin(inst));
}

// Random budget perceptron: perceptron trigger, uniform eviction at the cap.
inline StepOutcome rbp_step(KernelClassifier& c, const Instance& inst, size_t budget,
                            RngStream& rng, size_t round, double margin) {
  if (budget < 1) throw std::invalid_argument("rbp_step: budget must be >= 1");
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (inst.label * margin > 0.0) return out;
  if (c.sv_count() >= budget)
    c.remove_sv(static_cast<size_t>(rng.next_below(c.sv_count())));
  out.rho = 1.0;
  out.z = true;
  out.tau = 1.0;
  c.add_sv(inst.features, inst.self_dot, static_cast<double>(inst.label), round);
  out.updated = true;
  BOMKL_CHECK(c.sv_count() <= budget, "rbp within budget");
  return out;
}

// Forgetron (fixed-shrink variant): shrink all coefficients, drop the oldest
// SV, then add the new one.
inline StepOutcome forgetron_step(KernelClassifier& c, const Instance& inst, size_t budget,
                                  double shrink, size_t round, double margin) {
  if (budget < 1) throw std::invalid_argument("forgetron_step: budget must be >= 1");
  if (!(shrink > 0.0) || shrink > 1.0)
    throw std::invalid_argument("forgetron_step: shrink must be in (0,1]");
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (inst.label * margin > 0.0) return out;
  if (c.sv_count() >= budget) {
    c.scale_coefs(shrink);
    c.remove_oldest();
  }
  out.rho = 1.0;
  out.z = true;
  out.tau = 1.0;
  c.add_sv(inst.features, inst.self_dot, static_cast<double>(inst.label), round);
  out.updated = true;
  BOMKL_CHECK(c.sv_count() <= budget, "forgetron within budget");
  return out;
}

// Budget online gradient descent: per-call shrink by (1 - step*lambda); on
// loss, add step*y; at the cap evict uniformly and rescale survivors by
// B/(B-1) so the eviction is unbiased in expectation.
inline StepOutcome bogd_step(KernelClassifier& c, const Instance& inst, size_t budget,
                             double step, double lambda, double max_coef, RngStream& rng,
                             size_t round, double margin) {
  if (budget < 1) throw std::invalid_argument("bogd_step: budget must be >= 1");
  if (!(step > 0.0) || lambda < 0.0)
    throw std::invalid_argument("bogd_step: require step > 0 and lambda >= 0");
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  c.scale_coefs(1.0 - step * lambda);
  if (out.loss <= 0.0) return out;
  if (c.sv_count() >= budget) {
    c.remove_sv(static_cast<size_t>(rng.next_below(c.sv_count())));
    if (budget > 1)
      c.scale_coefs(static_cast<double>(budget) / static_cast<double>(budget - 1));
  }
  out.rho = 1.0;
  out.z = true;
  out.tau = std::min(step, max_coef);
  c.add_sv(inst.features, inst.self_dot, out.tau * inst.label, round);
  out.updated = true;
  BOMKL_CHECK(c.sv_count() <= budget, "bogd within budget");
  return out;
}

// Budget passive-aggressive (simple): below the cap this is pa_step with
// eta = C; at the cap, score every replacement candidate r by
//   Q(r) = 1/2 ||f_r + tau_r y k(x_t,.) - f||^2_H + C * l_t(f_r + tau_r y k(x_t,.))
// where f_r = f - coef_r k(x_r,.), and replace the argmin (ties: lowest r).
inline StepOutcome bpas_step(KernelClassifier& c, const Instance& inst, size_t budget,
                             double aggressiveness, size_t round, double margin) {
  if (budget < 1) throw std::invalid_argument("bpas_step: budget must be >= 1");
  if (!(aggressiveness > 0.0)) throw std::invalid_argument("bpas_step: C must be > 0");
  StepOutcome out;
  out.margin = margin;
  out.loss = hinge(margin, inst.label);
  if (out.loss <= 0.0) return out;
  const double y = inst.label;
  const double kxx = self_similarity_cached(c.kernel(), inst.self_dot);

  if (c.sv_count() < budget) {
    out.rho = 1.0;
    out.z = true;
    if (kxx <= 0.0) {
      out.degenerate = true;
      return out;
    }
    out.tau = std::min(aggressiveness, out.loss / kxx);
    c.add_sv(inst.features, inst.self_dot, out.tau * y, round);
    out.updated = true;
    return out;
  }

  std::vector<double> row;
  double m = c.margin_and_row(inst.features, inst.self_dot, row);
  const auto& svs = c.svs();
  double best_q = std::numeric_limits<double>::infinity();
  size_t best_r = 0;
  double best_tau = 0.0;
  for (size_t r = 0; r < svs.size(); ++r) {
    double coef_r = svs[r].coef;
    double margin_r = m - coef_r * row[r];
    double loss_r = hinge(margin_r, inst.label);
    double tau_r = kxx > 0.0 ? std::min(aggressiveness, loss_r / kxx) : aggressiveness;
    double krr = self_similarity_cached(c.kernel(), svs[r].self_dot);
    double dist = coef_r * coef_r * krr + tau_r * tau_r * kxx - 2.0 * coef_r * tau_r * y * row[r];
    double margin_new = margin_r + tau_r * y * kxx;
    double q = 0.5 * dist + aggressiveness * hinge(margin_new, inst.label);
    if (q < best_q) {
      best_q = q;
      best_r = r;
      best_tau = tau_r;
    }
  }
  c.remove_sv(best_r);
  out.rho = 1.0;
  out.z = true;
  out.tau = best_tau;
  out.degenerate = kxx <= 0.0;
  c.add_sv(inst.features, inst.self_dot, best_tau * y, round);
  out.updated = true;
  BOMKL_CHECK(c.sv_count() <= budget, "bpas within budget");
  return out;
}

enum class LearnerKind { kSpa, kPa, kPerceptron, kRbp, kForgetron, kBogd, kBpas };

inline const char* to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::kSpa: return "spa";
    case LearnerKind::kPa: return "pa";
    case LearnerKind::kPerceptron: return "perceptron";
    case LearnerKind::kRbp: return "rbp";
    case LearnerKind::kForgetron: return "forgetron";
    case LearnerKind::kBogd: return "bogd";
    case LearnerKind::kBpas: return "bpas";
  }
  return "?";
}

inline LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "spa") return LearnerKind::kSpa;
  if (s == "pa") return LearnerKind::kPa;
  if (s == "perceptron") return LearnerKind::kPerceptron;
  if (s == "rbp") return LearnerKind::kRbp;
  if (s == "forgetron") return LearnerKind::kForgetron;
  if (s == "bogd") return LearnerKind::kBogd;
  if (s == "bpas") return LearnerKind::kBpas;
  throw std::invalid_argument("unknown learner kind: " + s);
}

// One per-kernel online learner: the classifier, its update rule and the
// random stream it owns. Strictly sequential across rounds.
class SingleKernelLearner {
 public:
  SingleKernelLearner(KernelSpec kernel, LearnerKind kind, SpaParams spa, BudgetParams budget,
                      double pa_eta, RngStream rng)
      : classifier_(std::move(kernel)),
        kind_(kind),
        spa_(spa),
        budget_(budget),
        pa_eta_(pa_eta),
        rng_(rng) {
    spa_.validate();
    budget_.validate();
  }

  StepOutcome step(const Instance& inst, size_t round) {
    return step(inst, round, classifier_.margin(inst));
  }

  StepOutcome step(const Instance& inst, size_t round, double margin) {
    StepOutcome out;
    switch (kind_) {
      case LearnerKind::kSpa:
        out = spa_step(classifier_, inst, spa_, rng_, round, margin);
        break;
      case LearnerKind::kPa:
        out = pa_step(classifier_, inst, pa_eta_, round, margin);
        break;
      case LearnerKind::kPerceptron:
        out = perceptron_step(classifier_, inst, round, margin);
        break;
      case LearnerKind::kRbp:
        out = rbp_step(classifier_, inst, budget_.budget, rng_, round, margin);
        break;
      case LearnerKind::kForgetron:
        out = forgetron_step(classifier_, inst, budget_.budget, budget_.forgetron_shrink, round,
                             margin);
        break;
      case LearnerKind::kBogd:
        out = bogd_step(classifier_, inst, budget_.budget, budget_.bogd_step, budget_.bogd_lambda,
                        budget_.bogd_max_coef, rng_, round, margin);
        break;
      case LearnerKind::kBpas:
        out = bpas_step(classifier_, inst, budget_.budget, budget_.bpas_c, round, margin);
        break;
    }
    if (out.z) ++update_count_;
    if (out.degenerate) ++degenerate_count_;
    return out;
  }

  const KernelClassifier& classifier() const { return classifier_; }
  LearnerKind kind() const { return kind_; }
  size_t update_count() const { return update_count_; }
  size_t degenerate_count() const { return degenerate_count_; }

 private:
  KernelClassifier classifier_;
  LearnerKind kind_;
  SpaParams spa_;
  BudgetParams budget_;
  double pa_eta_;
  RngStream rng_;
  size_t update_count_ = 0;
  size_t degenerate_count_ = 0;
};

}  // namespace bomkl
