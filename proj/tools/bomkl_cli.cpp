// Benchmark CLI: seeded online runs, repetition averaging, alpha/beta sweeps,
// best-single-kernel search and regret reports, emitted as CSV or JSON.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bomkl/bomkl.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string dataset;
  std::string dataset_name;
  std::string algorithm;
  std::string format;
  std::string out_dir;
  std::string hedge_loss;
  uint64_t seed = 0;
  size_t reps = 0;
  size_t subsample = 0;
  size_t budget = 0;
  double eta = 0, alpha = 0, beta = 0, gamma = 0, delta = 0;
  bool scale = false;
  bool normalize_kernels = false;

  CLI::Option* o_dataset = nullptr;
  CLI::Option* o_dataset_name = nullptr;
  CLI::Option* o_algorithm = nullptr;
  CLI::Option* o_format = nullptr;
  CLI::Option* o_out_dir = nullptr;
  CLI::Option* o_hedge_loss = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_reps = nullptr;
  CLI::Option* o_subsample = nullptr;
  CLI::Option* o_budget = nullptr;
  CLI::Option* o_eta = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_scale = nullptr;
  CLI::Option* o_normalize = nullptr;
};

void add_common_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON run config; flags override its fields");
  f.o_dataset = app->add_option("--dataset", f.dataset, "LIBSVM dataset path (.gz accepted)");
  f.o_dataset_name = app->add_option("--dataset-name", f.dataset_name, "dataset display name");
  f.o_algorithm = app->add_option(
      "--algorithm", f.algorithm,
      "bomkc_spa | omkc_u | omkc_dd | omkc_sd | bomkc_rbp | bomkc_forgetron | bomkc_bogd | "
      "bomkc_bpas");
  f.o_seed = app->add_option("--seed", f.seed, "base seed (default 42)");
  f.o_reps = app->add_option("--reps", f.reps, "number of seeded repetitions");
  f.o_subsample = app->add_option("--subsample", f.subsample, "seeded subsample size (0 = all)");
  f.o_budget = app->add_option("--budget", f.budget, "per-kernel SV budget B");
  f.o_eta = app->add_option("--eta", f.eta, "aggressiveness eta");
  f.o_alpha = app->add_option("--alpha", f.alpha, "sampling parameter alpha");
  f.o_beta = app->add_option("--beta", f.beta, "sampling parameter beta");
  f.o_gamma = app->add_option("--gamma", f.gamma, "hedge discount gamma");
  f.o_delta = app->add_option("--delta", f.delta, "hedge smoothing delta");
  f.o_hedge_loss = app->add_option("--hedge-loss", f.hedge_loss, "hinge | mistake");
  f.o_format = app->add_option("--format", f.format, "csv | json")
                   ->check(CLI::IsMember({"csv", "json"}));
  f.o_out_dir = app->add_option("--out-dir", f.out_dir, "output directory");
  f.o_scale = app->add_flag("--scale", f.scale, "per-feature min-max scaling");
  f.o_normalize = app->add_flag("--normalize-kernels", f.normalize_kernels,
                                "cosine-normalize every kernel");
}

bomkl::RunConfig build_config(const CommonFlags& f) {
  bomkl::RunConfig cfg;
  if (!f.config_path.empty()) cfg = bomkl::load_config(f.config_path);
  if (f.o_dataset->count()) cfg.dataset_path = f.dataset;
  if (f.o_dataset_name->count()) cfg.dataset_name = f.dataset_name;
  if (f.o_algorithm->count()) cfg.algorithm = bomkl::algorithm_from_string(f.algorithm);
  if (f.o_seed->count()) cfg.seed = f.seed;
  if (f.o_reps->count()) cfg.reps = f.reps;
  if (f.o_subsample->count()) cfg.subsample = f.subsample;
  if (f.o_budget->count()) cfg.budget.budget = f.budget;
  if (f.o_eta->count()) cfg.spa.eta = f.eta;
  if (f.o_alpha->count()) cfg.spa.alpha = f.alpha;
  if (f.o_beta->count()) cfg.spa.beta = f.beta;
  if (f.o_gamma->count()) cfg.gamma = f.gamma;
  if (f.o_delta->count()) cfg.delta = f.delta;
  if (f.o_hedge_loss->count()) cfg.hedge_loss = f.hedge_loss;
  if (f.o_format->count()) cfg.format = f.format;
  if (f.o_out_dir->count()) cfg.out_dir = f.out_dir;
  if (f.o_scale->count()) cfg.scale_features = true;
  if (f.o_normalize->count()) cfg.normalize_kernels = true;
  cfg.validate();
  return cfg;
}

std::string out_path(const bomkl::RunConfig& cfg, const std::string& file) {
  return cfg.out_dir.empty() ? file : cfg.out_dir + "/" + file;
}

void emit_runs(const bomkl::RunConfig& cfg, const std::vector<bomkl::RunMetrics>& runs) {
  if (cfg.format == "csv") {
    bomkl::write_text_file(out_path(cfg, "runs.csv"), bomkl::runs_to_csv(runs));
    bomkl::write_text_file(out_path(cfg, "trajectories.csv"), bomkl::trajectories_to_csv(runs));
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : runs) arr.push_back(bomkl::run_to_json(r));
    bomkl::write_text_file(out_path(cfg, "runs.json"), arr.dump(2) + "\n");
  }
}

int cmd_run(const CommonFlags& flags, const std::string& model_path) {
  bomkl::RunConfig cfg = build_config(flags);
  bomkl::Dataset ds = bomkl::load_dataset(cfg);
  bomkl::RngStream perm_rng(cfg.seed, bomkl::stream::id(bomkl::stream::kPermute));
  bomkl::PermutedView view(ds, perm_rng.permutation(ds.size()));

  bomkl::MultiKernelModel model(cfg.kernel_pool(), cfg.algorithm, cfg.spa, cfg.budget, cfg.gamma,
                                cfg.delta, cfg.seed, cfg.round_policy());
  bomkl::RunMetrics metrics = bomkl::run_experiment(cfg, cfg.seed, ds);
  emit_runs(cfg, {metrics});
  if (!model_path.empty()) {
    for (size_t t = 0; t < view.size(); ++t) model.round(view[t]);
    bomkl::save_snapshot(model.snapshot(), model_path);
  }
  std::printf("%s %s seed=%llu rounds=%zu mistakes=%zu rate=%.4f svs=%zu time=%.3fs\n",
              metrics.algorithm.c_str(), metrics.dataset.c_str(),
              static_cast<unsigned long long>(metrics.seed), metrics.rounds, metrics.mistakes,
              metrics.mistake_rate, metrics.total_svs, metrics.wall_seconds);
  return 0;
}

int cmd_bench(const CommonFlags& flags) {
  bomkl::RunConfig cfg = build_config(flags);
  bomkl::BenchResult result = bomkl::repeat_and_average(cfg);
  if (cfg.format == "csv")
    bomkl::write_text_file(out_path(cfg, "summary.csv"), bomkl::summaries_to_csv({result.summary}));
  else
    bomkl::write_text_file(out_path(cfg, "summary.json"),
                           bomkl::summary_to_json(result.summary).dump(2) + "\n");
  emit_runs(cfg, result.runs);
  const bomkl::Summary& s = result.summary;
  std::printf("%s %s reps=%zu mistake=%.4f+-%.4f svs=%.1f+-%.1f time=%.3fs\n", s.algorithm.c_str(),
              s.dataset.c_str(), s.reps, s.mistake_mean, s.mistake_std, s.sv_mean, s.sv_std,
              s.time_mean);
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<double>& alphas,
              const std::vector<double>& betas) {
  bomkl::RunConfig cfg = build_config(flags);
  std::vector<bomkl::SweepCell> cells = bomkl::sweep(cfg, alphas, betas);
  if (cfg.format == "csv")
    bomkl::write_text_file(out_path(cfg, "sweep.csv"), bomkl::sweep_to_csv(cells));
  else
    bomkl::write_text_file(out_path(cfg, "sweep.json"), bomkl::sweep_to_json(cells).dump(2) + "\n");
  for (const auto& c : cells)
    std::printf("alpha=%g beta=%g mistake=%.4f svs=%.1f\n", c.alpha, c.beta,
                c.summary.mistake_mean, c.summary.sv_mean);
  return 0;
}

int cmd_search_kernel(const CommonFlags& flags) {
  bomkl::RunConfig cfg = build_config(flags);
  bomkl::BestKernelResult best = bomkl::best_single_kernel_search(cfg);
  nlohmann::json j{{"index", best.index},
                   {"kernel", bomkl::kernel_to_json(best.kernel)},
                   {"mistake_rate", best.metrics.mistake_rate},
                   {"mistakes", best.metrics.mistakes},
                   {"rounds", best.metrics.rounds},
                   {"svs", best.metrics.total_svs}};
  bomkl::write_text_file(out_path(cfg, "best_kernel.json"), j.dump(2) + "\n");
  std::printf("best kernel [%zu] %s mistake=%.4f svs=%zu\n", best.index,
              best.kernel.describe().c_str(), best.metrics.mistake_rate, best.metrics.total_svs);
  return 0;
}

int cmd_regret(const CommonFlags& flags, size_t epochs) {
  bomkl::RunConfig cfg = build_config(flags);
  bomkl::RegretReport report = bomkl::empirical_regret_report(cfg, bomkl::load_dataset(cfg), epochs);
  if (cfg.format == "csv") {
    bomkl::write_text_file(out_path(cfg, "regret_kernels.csv"),
                           bomkl::regret_kernels_to_csv(report));
    bomkl::write_text_file(out_path(cfg, "regret_trajectory.csv"),
                           bomkl::regret_trajectory_to_csv(report));
  } else {
    bomkl::write_text_file(out_path(cfg, "regret.json"),
                           bomkl::regret_to_json(report).dump(2) + "\n");
  }
  std::printf("regret report: rounds=%zu combined_loss=%.2f kernels=%zu\n", report.rounds,
              report.combined_online_loss, report.kernels.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budget online multi-kernel classification benchmark"};
  app.require_subcommand(1);

  CommonFlags run_flags, bench_flags, sweep_flags, search_flags, regret_flags;
  std::string model_path;
  std::vector<double> alphas{1.0}, betas;
  size_t regret_epochs = 5;

  CLI::App* run = app.add_subcommand("run", "one seeded online pass");
  add_common_flags(run, run_flags);
  run->add_option("--save-model", model_path, "write final classifier snapshot (JSON)");

  CLI::App* bench = app.add_subcommand("bench", "repeat over seeds and average");
  add_common_flags(bench, bench_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "alpha/beta grid of benches");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--alphas", alphas, "alpha values")->delimiter(',');
  sweep->add_option("--betas", betas, "beta values")->delimiter(',')->required();

  CLI::App* search = app.add_subcommand("search-kernel", "best single kernel by perceptron");
  add_common_flags(search, search_flags);

  CLI::App* regret = app.add_subcommand("regret", "cumulative loss vs batch comparator");
  add_common_flags(regret, regret_flags);
  regret->add_option("--epochs", regret_epochs, "comparator PA epochs (default 5)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags, model_path);
    if (bench->parsed()) return cmd_bench(bench_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, alphas, betas);
    if (search->parsed()) return cmd_search_kernel(search_flags);
    if (regret->parsed()) return cmd_regret(regret_flags, regret_epochs);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
