#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pinnkan/common.hpp"
#include "pinnkan/diag/hessian.hpp"
#include "pinnkan/diag/ntk.hpp"
#include "pinnkan/exp/experiment.hpp"
#include "pinnkan/exp/runner.hpp"

namespace fs = std::filesystem;
using namespace pinnkan;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;   // bad config, bad input files
constexpr int kDiverged = 2;  // training blew up (or a numeric dead end)

fs::path output_root() {
  const char* env = std::getenv("PINNKAN_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

int status_code(const std::string& status) {
  return status == "completed" ? kOk : kDiverged;
}

void print_result(const exp::RunResult& res) {
  std::cout << "run_dir: " << res.run_dir.string() << "\n"
            << "status: " << res.train.status << "\n";
  for (const auto& [field, pct] : res.rel_l2)
    std::cout << "rel_l2_" << field << ": " << fmt17(pct) << "\n";
  if (res.train.mean_time_per_iter > 0)
    std::cout << "t_it: " << fmt17(res.train.mean_time_per_iter) << "\n";
}

int cmd_train(const std::string& config_path, const std::string& out,
              const std::uint64_t* seed, const int* iters, bool resume) {
  exp::ExperimentConfig cfg = exp::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (iters) cfg.iterations = *iters;
  if (!out.empty())
    cfg.out = out;
  else if (cfg.out.empty())
    cfg.out = (output_root() / exp::run_dir_name(cfg)).string();
  exp::RunResult res = exp::run_experiment(cfg, resume);
  print_result(res);
  return status_code(res.train.status);
}

int cmd_sweep(const std::string& config_path, const std::string& out,
              const std::uint64_t* seed, const int* iters) {
  exp::SweepSpec sw = exp::load_sweep(config_path);
  if (seed) sw.base.seed = *seed;
  if (iters) sw.base.iterations = *iters;
  fs::path root = !out.empty()             ? fs::path(out)
                  : !sw.base.out.empty()   ? fs::path(sw.base.out)
                                           : output_root() / "sweep";
  auto cells = exp::run_sweep(sw, root);
  for (const auto& c : cells) {
    std::cout << exp::run_dir_name(c.cfg) << ": " << c.status;
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << "\n";
  }
  std::cout << "table: " << (root / "sweep.csv").string() << "\n";
  return kOk;
}

int cmd_diagnose(const std::string& which, const std::string& run) {
  fs::path run_dir = run;
  exp::ExperimentConfig cfg = exp::load_config(run_dir / exp::kConfigFile);
  prob::Problem p = exp::problem_of(cfg);
  fs::path out_file;
  if (which == "ntk") {
    auto rows = diag::ntk_spectrum_report(run_dir, p);
    out_file = run_dir / "ntk_spectrum.csv";
    diag::write_ntk_csv(out_file, rows);
  } else {
    auto rows = diag::hessian_trace_report(run_dir, p);
    out_file = run_dir / "hessian_trace.csv";
    diag::write_hessian_csv(out_file, rows);
  }
  std::cout << "wrote: " << out_file.string() << "\n";
  return kOk;
}

int cmd_eval(const std::string& run, const std::string& config_path) {
  std::optional<exp::ExperimentConfig> override_cfg;
  if (!config_path.empty()) override_cfg = exp::load_config(config_path);
  exp::RunResult res = exp::eval_experiment(run, override_cfg);
  print_result(res);
  return status_code(res.train.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "physics-informed MLP and KAN benchmark: training, error tables, and "
      "kernel/curvature diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out, which;
  std::uint64_t seed = 0;
  int iters = 0;
  bool resume = false;

  auto* train = app.add_subcommand("train", "train one experiment and export "
                                            "metrics, fields and checkpoints");
  train->add_option("--config", config_path, "experiment config file")
      ->required();
  train->add_option("--out", out, "run directory (default: $PINNKAN_OUT or "
                                  "./runs, plus an auto name)");
  auto* train_seed = train->add_option("--seed", seed, "override the seed");
  auto* train_iters =
      train->add_option("--iters", iters, "override the iteration count");
  train->add_flag("--resume", resume,
                  "continue from the run directory's saved optimizer state");

  auto* sweep = app.add_subcommand(
      "sweep", "run a (problem x family x arch) matrix and tabulate errors");
  sweep->add_option("--config", config_path, "sweep config file")->required();
  sweep->add_option("--out", out, "sweep root directory");
  auto* sweep_seed =
      sweep->add_option("--seed", seed, "override the master seed");
  auto* sweep_iters = sweep->add_option("--iters", iters,
                                        "override the per-cell iterations");

  auto* diagnose = app.add_subcommand(
      "diagnose", "kernel spectra or curvature traces from saved snapshots");
  diagnose->add_option("which", which, "ntk | hessian")
      ->required()
      ->check(CLI::IsMember({"ntk", "hessian"}));
  diagnose->add_option("--out", out, "run directory to diagnose")->required();

  auto* eval = app.add_subcommand(
      "eval", "re-run the evaluation and export of an existing run");
  eval->add_option("--out", out, "run directory to evaluate")->required();
  eval->add_option("--config", config_path,
                   "override config (must hash like the stored one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFailure;
  }

  try {
    if (train->parsed())
      return cmd_train(config_path, out, *train_seed ? &seed : nullptr,
                       *train_iters ? &iters : nullptr, resume);
    if (sweep->parsed())
      return cmd_sweep(config_path, out, *sweep_seed ? &seed : nullptr,
                       *sweep_iters ? &iters : nullptr);
    if (diagnose->parsed()) return cmd_diagnose(which, out);
    return cmd_eval(out, config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
