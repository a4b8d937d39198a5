#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bomkl/config.hpp"
#include "bomkl/dataset.hpp"
#include "bomkl/multi_kernel.hpp"

namespace bomkl {

// Online trajectory and end-of-run counters for one seeded pass.
struct RunMetrics {
  std::string algorithm;
  std::string dataset;
  uint64_t seed = 0;
  size_t rounds = 0;
  size_t mistakes = 0;
  double mistake_rate = std::numeric_limits<double>::quiet_NaN();  // NaN when rounds = 0
  std::vector<std::pair<size_t, size_t>> trajectory;  // (round, cumulative mistakes)
  std::vector<size_t> sv_counts;                      // per kernel
  size_t total_svs = 0;
  std::vector<size_t> update_counts;                  // per kernel (SPA z-counts)
  size_t degenerate = 0;                              // k(x,x)=0 diagnostics
  double wall_seconds = 0.0;
};

struct Summary {
  std::string algorithm;
  std::string dataset;
  uint64_t seed_base = 0;
  size_t reps = 0;
  double mistake_mean = 0.0, mistake_std = 0.0;
  double sv_mean = 0.0, sv_std = 0.0;
  double time_mean = 0.0, time_std = 0.0;
};

struct BenchResult {
  Summary summary;
  std::vector<RunMetrics> runs;
};

namespace detail {

// 100 evenly spaced checkpoints plus the final round.
inline std::vector<size_t> checkpoint_rounds(size_t total) {
  std::vector<size_t> rounds;
  if (total == 0) return rounds;
  for (size_t k = 1; k <= 100; ++k) {
    size_t r = total * k / 100;
    if (r >= 1 && (rounds.empty() || rounds.back() != r)) rounds.push_back(r);
  }
  if (rounds.empty() || rounds.back() != total) rounds.push_back(total);
  return rounds;
}

inline void mean_std(const std::vector<double>& xs, double& mean, double& std_dev) {
  mean = 0.0;
  std_dev = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

inline Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw std::runtime_error("config: dataset path is empty");
  Dataset ds = load_libsvm_file(cfg.dataset_path, cfg.dataset_name);
  if (cfg.subsample > 0 && cfg.subsample < ds.size()) {
    RngStream rng(cfg.subsample_seed, stream::id(stream::kSubsample));
    ds = subsample(ds, cfg.subsample, rng);
  }
  if (cfg.scale_features) ds = scale_min_max(ds);
  return ds;
}

// Empirical form of the expected-SV bound: per-kernel update frequency may
// not exceed alpha/beta by more than three binomial standard deviations.
// Checked automatically after every SPA run.
inline void check_sv_ratio_bound(const MultiKernelModel& model, const SpaParams& spa,
                                 size_t rounds) {
  if (rounds == 0) return;
  double ratio_cap = spa.alpha / spa.beta;
  double slack = 3.0 * std::sqrt(ratio_cap * (1.0 - ratio_cap) / static_cast<double>(rounds));
  for (size_t i = 0; i < model.learners().size(); ++i) {
    double ratio = static_cast<double>(model.learners()[i].update_count()) /
                   static_cast<double>(rounds);
    BOMKL_CHECK(ratio <= ratio_cap + slack, "SPA update ratio within alpha/beta + 3 sigma");
  }
}

// One full online pass over a fresh permutation; deterministic given
// (config, seed) apart from wall_seconds.
inline RunMetrics run_experiment(const RunConfig& cfg, uint64_t seed, const Dataset& ds) {
  cfg.validate();
  RngStream perm_rng(seed, stream::id(stream::kPermute));
  PermutedView view(ds, perm_rng.permutation(ds.size()));

  MultiKernelModel model(cfg.kernel_pool(), cfg.algorithm, cfg.spa, cfg.budget, cfg.gamma,
                         cfg.delta, seed, cfg.round_policy());

  RunMetrics m;
  m.algorithm = to_string(cfg.algorithm);
  m.dataset = ds.name;
  m.seed = seed;
  m.rounds = ds.size();

  std::vector<size_t> checkpoints = detail::checkpoint_rounds(ds.size());
  size_t next_cp = 0;

  auto t0 = std::chrono::steady_clock::now();
  for (size_t t = 0; t < view.size(); ++t) {
    model.round(view[t]);
    if (next_cp < checkpoints.size() && t + 1 == checkpoints[next_cp]) {
      m.trajectory.emplace_back(t + 1, model.cumulative_mistakes());
      ++next_cp;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  m.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  m.mistakes = model.cumulative_mistakes();
  if (m.rounds > 0) m.mistake_rate = static_cast<double>(m.mistakes) / m.rounds;
  m.sv_counts = model.per_kernel_sv_counts();
  m.update_counts = model.per_kernel_update_counts();
  m.total_svs = model.total_sv_count();
  for (const auto& l : model.learners()) m.degenerate += l.degenerate_count();

  if (cfg.algorithm == Algorithm::kBomkcSpa) check_sv_ratio_bound(model, cfg.spa, m.rounds);
  return m;
}

inline RunMetrics run_experiment(const RunConfig& cfg, uint64_t seed) {
  return run_experiment(cfg, seed, load_dataset(cfg));
}

inline Summary summarize(const std::vector<RunMetrics>& runs, const RunConfig& cfg) {
  Summary s;
  s.algorithm = to_string(cfg.algorithm);
  s.dataset = runs.empty() ? cfg.dataset_name : runs.front().dataset;
  s.seed_base = cfg.seed;
  s.reps = runs.size();
  std::vector<double> mistakes, svs, times;
  for (const auto& r : runs) {
    mistakes.push_back(r.mistake_rate);
    svs.push_back(static_cast<double>(r.total_svs));
    times.push_back(r.wall_seconds);
  }
  detail::mean_std(mistakes, s.mistake_mean, s.mistake_std);
  detail::mean_std(svs, s.sv_mean, s.sv_std);
  detail::mean_std(times, s.time_mean, s.time_std);
  return s;
}

// Seeds base..base+R-1; repetitions run in parallel, results are collected
// by seed index so output order never depends on scheduling.
inline BenchResult repeat_and_average(const RunConfig& cfg, const Dataset& ds) {
  cfg.validate();
  BenchResult result;
  result.runs.resize(cfg.reps);
  size_t workers = std::min<size_t>(cfg.reps, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (size_t i = next.fetch_add(1); i < cfg.reps; i = next.fetch_add(1))
          result.runs[i] = run_experiment(cfg, cfg.seed + i, ds);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  result.summary = summarize(result.runs, cfg);
  return result;
}

inline BenchResult repeat_and_average(const RunConfig& cfg) {
  return repeat_and_average(cfg, load_dataset(cfg));
}

struct SweepCell {
  double alpha = 0.0;
  double beta = 0.0;
  Summary summary;
};

// One summary per (alpha, beta) cell with beta >= alpha; other pairs are
// skipped with a warning.
inline std::vector<SweepCell> sweep(const RunConfig& cfg, const std::vector<double>& alphas,
                                    const std::vector<double>& betas, const Dataset& ds) {
  std::vector<SweepCell> cells;
  for (double a : alphas)
    for (double b : betas) {
      if (!(a > 0.0) || !(b >= a)) {
        std::cerr << "sweep: skipping cell alpha=" << a << " beta=" << b
                  << " (requires beta >= alpha > 0)\n";
        continue;
      }
      RunConfig cell_cfg = cfg;
      cell_cfg.spa.alpha = a;
      cell_cfg.spa.beta = b;
      SweepCell cell;
      cell.alpha = a;
      cell.beta = b;
      cell.summary = repeat_and_average(cell_cfg, ds).summary;
      cells.push_back(std::move(cell));
    }
  if (cells.empty()) throw std::invalid_argument("sweep: every (alpha,beta) cell was skipped");
  return cells;
}

inline std::vector<SweepCell> sweep(const RunConfig& cfg, const std::vector<double>& alphas,
                                    const std::vector<double>& betas) {
  return sweep(cfg, alphas, betas, load_dataset(cfg));
}

struct BestKernelResult {
  size_t index = 0;
  KernelSpec kernel;
  RunMetrics metrics;
};

// Kernel perceptron once per pool kernel on ONE fixed permutation; the
// argmin-mistake kernel backs the single-kernel baseline rows. Ties go to
// the lowest pool index.
inline BestKernelResult best_single_kernel_search(const RunConfig& cfg, const Dataset& ds) {
  std::vector<KernelSpec> pool = cfg.kernel_pool();
  if (pool.empty()) throw std::invalid_argument("best_single_kernel_search: empty pool");
  RngStream perm_rng(cfg.seed, stream::id(stream::kPermute));
  PermutedView view(ds, perm_rng.permutation(ds.size()));

  BestKernelResult best;
  size_t best_mistakes = std::numeric_limits<size_t>::max();
  for (size_t i = 0; i < pool.size(); ++i) {
    KernelClassifier c(pool[i]);
    size_t mistakes = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t t = 0; t < view.size(); ++t) {
      const Instance& inst = view[t];
      double margin = c.margin(inst);
      if (predict_sign(margin) != inst.label) ++mistakes;
      perceptron_step(c, inst, t, margin);
    }
    auto t1 = std::chrono::steady_clock::now();
    if (mistakes < best_mistakes) {
      best_mistakes = mistakes;
      best.index = i;
      best.kernel = pool[i];
      best.metrics = RunMetrics{};
      best.metrics.algorithm = "perceptron";
      best.metrics.dataset = ds.name;
      best.metrics.seed = cfg.seed;
      best.metrics.rounds = view.size();
      best.metrics.mistakes = mistakes;
      if (view.size() > 0)
        best.metrics.mistake_rate = static_cast<double>(mistakes) / view.size();
      best.metrics.sv_counts = {c.sv_count()};
      best.metrics.total_svs = c.sv_count();
      best.metrics.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    }
  }
  return best;
}

inline BestKernelResult best_single_kernel_search(const RunConfig& cfg) {
  return best_single_kernel_search(cfg, load_dataset(cfg));
}

// Cumulative online hinge loss per kernel and for the combination, with
// loss/sqrt(t) ratio trajectories. The batch comparator is approximated by a
// multi-epoch PA pass over the same stream.
struct RegretReport {
  size_t rounds = 0;
  size_t comparator_epochs = 0;
  double combined_online_loss = 0.0;
  std::vector<std::pair<size_t, double>> combined_ratio;  // (round, loss/sqrt(round))
  struct KernelRow {
    size_t kernel = 0;
    std::string kernel_desc;
    double online_loss = 0.0;
    double comparator_loss = 0.0;
    double regret = 0.0;  // online - comparator
  };
  std::vector<KernelRow> kernels;
};

inline RegretReport empirical_regret_report(const RunConfig& cfg, const Dataset& ds,
                                            size_t comparator_epochs = 5) {
  if (ds.size() > 20000)
    throw std::invalid_argument("empirical_regret_report: dataset too large (T <= 20k)");
  RegretReport report;
  report.comparator_epochs = comparator_epochs;
  if (ds.size() == 0) return report;

  RngStream perm_rng(cfg.seed, stream::id(stream::kPermute));
  PermutedView view(ds, perm_rng.permutation(ds.size()));
  std::vector<KernelSpec> pool = cfg.kernel_pool();
  RunConfig spa_cfg = cfg;
  spa_cfg.algorithm = Algorithm::kBomkcSpa;
  MultiKernelModel model(pool, spa_cfg.algorithm, spa_cfg.spa, spa_cfg.budget, spa_cfg.gamma,
                         spa_cfg.delta, cfg.seed, spa_cfg.round_policy());

  std::vector<double> kernel_loss(pool.size(), 0.0);
  double combined_loss = 0.0;
  std::vector<size_t> checkpoints = detail::checkpoint_rounds(ds.size());
  size_t next_cp = 0;
  for (size_t t = 0; t < view.size(); ++t) {
    RoundResult r = model.round(view[t]);
    combined_loss += r.combined_loss;
    const std::vector<double>& losses = model.last_losses();
    for (size_t i = 0; i < pool.size(); ++i) kernel_loss[i] += losses[i];
    if (next_cp < checkpoints.size() && t + 1 == checkpoints[next_cp]) {
      report.combined_ratio.emplace_back(t + 1, combined_loss / std::sqrt(double(t + 1)));
      ++next_cp;
    }
  }
  report.rounds = ds.size();
  report.combined_online_loss = combined_loss;

  for (size_t i = 0; i < pool.size(); ++i) {
    KernelClassifier comparator(pool[i]);
    for (size_t epoch = 0; epoch < comparator_epochs; ++epoch)
      for (size_t t = 0; t < view.size(); ++t)
        pa_step(comparator, view[t], spa_cfg.spa.eta, epoch * view.size() + t);
    double fixed_loss = 0.0;
    for (size_t t = 0; t < view.size(); ++t)
      fixed_loss += hinge(comparator.margin(view[t]), view[t].label);
    RegretReport::KernelRow row;
    row.kernel = i;
    row.kernel_desc = pool[i].describe();
    row.online_loss = kernel_loss[i];
    row.comparator_loss = fixed_loss;
    row.regret = kernel_loss[i] - fixed_loss;
    report.kernels.push_back(std::move(row));
  }
  return report;
}

inline RegretReport empirical_regret_report(const RunConfig& cfg) {
  return empirical_regret_report(cfg, load_dataset(cfg));
}

// ---- emission ----------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string summaries_to_csv(const std::vector<Summary>& summaries) {
  std::string out =
      "algorithm,dataset,seed_base,reps,mistake_mean,mistake_std,sv_mean,sv_std,time_mean,"
      "time_std\n";
  for (const Summary& s : summaries) {
    out += s.algorithm + ',' + s.dataset + ',' + std::to_string(s.seed_base) + ',' +
           std::to_string(s.reps) + ',' + detail::fmt(s.mistake_mean) + ',' +
           detail::fmt(s.mistake_std) + ',' + detail::fmt(s.sv_mean) + ',' +
           detail::fmt(s.sv_std) + ',' + detail::fmt(s.time_mean) + ',' +
           detail::fmt(s.time_std) + '\n';
  }
  return out;
}

inline nlohmann::json summary_to_json(const Summary& s) {
  return {{"algorithm", s.algorithm}, {"dataset", s.dataset},
          {"seed_base", s.seed_base}, {"reps", s.reps},
          {"mistake_mean", s.mistake_mean}, {"mistake_std", s.mistake_std},
          {"sv_mean", s.sv_mean}, {"sv_std", s.sv_std},
          {"time_mean", s.time_mean}, {"time_std", s.time_std}};
}

inline std::string runs_to_csv(const std::vector<RunMetrics>& runs) {
  std::string out =
      "algorithm,dataset,seed,rounds,mistakes,mistake_rate,total_svs,total_updates,degenerate,"
      "wall_seconds\n";
  for (const RunMetrics& r : runs) {
    size_t updates = 0;
    for (size_t u : r.update_counts) updates += u;
    out += r.algorithm + ',' + r.dataset + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.rounds) + ',' + std::to_string(r.mistakes) + ',' +
           detail::fmt(r.mistake_rate) + ',' + std::to_string(r.total_svs) + ',' +
           std::to_string(updates) + ',' + std::to_string(r.degenerate) + ',' +
           detail::fmt(r.wall_seconds) + '\n';
  }
  return out;
}

inline std::string trajectories_to_csv(const std::vector<RunMetrics>& runs) {
  std::string out = "algorithm,dataset,seed,round,cumulative_mistakes\n";
  for (const RunMetrics& r : runs)
    for (const auto& [round, mistakes] : r.trajectory)
      out += r.algorithm + ',' + r.dataset + ',' + std::to_string(r.seed) + ',' +
             std::to_string(round) + ',' + std::to_string(mistakes) + '\n';
  return out;
}

inline nlohmann::json run_to_json(const RunMetrics& r) {
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& [round, mistakes] : r.trajectory) traj.push_back({round, mistakes});
  nlohmann::json j{{"algorithm", r.algorithm},
                   {"dataset", r.dataset},
                   {"seed", r.seed},
                   {"rounds", r.rounds},
                   {"mistakes", r.mistakes},
                   {"total_svs", r.total_svs},
                   {"sv_counts", r.sv_counts},
                   {"update_counts", r.update_counts},
                   {"degenerate", r.degenerate},
                   {"trajectory", traj},
                   {"wall_seconds", r.wall_seconds}};
  if (r.rounds > 0)
    j["mistake_rate"] = r.mistake_rate;
  else
    j["mistake_rate"] = nullptr;  // 0 of 0
  return j;
}

// Long-format sweep grid, one row per (alpha,beta) cell; plot-ready.
inline std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::string out =
      "alpha,beta,algorithm,dataset,seed_base,reps,mistake_mean,mistake_std,sv_mean,sv_std,"
      "time_mean,time_std\n";
  for (const SweepCell& c : cells) {
    const Summary& s = c.summary;
    out += detail::fmt(c.alpha) + ',' + detail::fmt(c.beta) + ',' + s.algorithm + ',' +
           s.dataset + ',' + std::to_string(s.seed_base) + ',' + std::to_string(s.reps) + ',' +
           detail::fmt(s.mistake_mean) + ',' + detail::fmt(s.mistake_std) + ',' +
           detail::fmt(s.sv_mean) + ',' + detail::fmt(s.sv_std) + ',' +
           detail::fmt(s.time_mean) + ',' + detail::fmt(s.time_std) + '\n';
  }
  return out;
}

inline nlohmann::json sweep_to_json(const std::vector<SweepCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepCell& c : cells) {
    nlohmann::json j = summary_to_json(c.summary);
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    arr.push_back(j);
  }
  return arr;
}

inline std::string regret_kernels_to_csv(const RegretReport& r) {
  std::string out = "kernel,kernel_desc,online_loss,comparator_loss,regret\n";
  for (const auto& row : r.kernels)
    out += std::to_string(row.kernel) + ',' + row.kernel_desc + ',' +
           detail::fmt(row.online_loss) + ',' + detail::fmt(row.comparator_loss) + ',' +
           detail::fmt(row.regret) + '\n';
  return out;
}

inline std::string regret_trajectory_to_csv(const RegretReport& r) {
  std::string out = "round,combined_loss_over_sqrt_t\n";
  for (const auto& [round, ratio] : r.combined_ratio)
    out += std::to_string(round) + ',' + detail::fmt(ratio) + '\n';
  return out;
}

inline nlohmann::json regret_to_json(const RegretReport& r) {
  nlohmann::json kernels = nlohmann::json::array();
  for (const auto& row : r.kernels)
    kernels.push_back({{"kernel", row.kernel},
                       {"kernel_desc", row.kernel_desc},
                       {"online_loss", row.online_loss},
                       {"comparator_loss", row.comparator_loss},
                       {"regret", row.regret}});
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& [round, ratio] : r.combined_ratio) traj.push_back({round, ratio});
  return {{"rounds", r.rounds},
          {"comparator_epochs", r.comparator_epochs},
          {"combined_online_loss", r.combined_online_loss},
          {"combined_ratio", traj},
          {"kernels", kernels}};
}

}  // namespace bomkl
