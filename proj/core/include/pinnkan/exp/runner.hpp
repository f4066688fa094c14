#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pinnkan/exp/experiment.hpp"
#include "pinnkan/train/trainer.hpp"

namespace pinnkan::exp {

struct RunResult {
  train::TrainResult train;
  // percent relative L2 per evaluated field; empty when the run diverged or
  // the cavity has no reference file to compare against
  std::vector<std::pair<std::string, double>> rel_l2;
  std::filesystem::path run_dir;
};

// Trains per the config and populates cfg.out with
//   config.cfg        canonical config copy (output path stripped)
//   loss_history.csv, model.ckpt, adam.state, snap_<k>.ckpt
//   fields.csv        predictions and references on the report grid
//   metrics.json      deterministic summary: identical configs give
//                     byte-identical files
//   timing.json       wall-clock figures, kept apart from the metrics so
//                     reruns can be compared byte for byte
RunResult run_experiment(const ExperimentConfig& cfg, bool resume = false);

// Re-runs the evaluation half of run_experiment on an existing run
// directory, rewriting fields.csv and metrics.json. An override config (for
// example one that now names a cavity reference file) must hash like the
// stored one.
RunResult eval_experiment(const std::filesystem::path& run_dir,
                          const std::optional<ExperimentConfig>& override_cfg =
                              std::nullopt);

// File names inside a run directory, next to the trainer's artifacts.
inline const char* kConfigFile = "config.cfg";
inline const char* kMetricsFile = "metrics.json";
inline const char* kTimingFile = "timing.json";
inline const char* kFieldsFile = "fields.csv";

// "<problem>_<family>_<arch or custom>_<first 8 hash digits>"
std::string run_dir_name(const ExperimentConfig& cfg);

struct SweepSpec {
  std::vector<std::string> problems;
  std::vector<std::string> families;
  std::vector<std::string> archs;
  ExperimentConfig base;  // shared settings for every cell
};

// Sweep files hold the cell lists plus any experiment keys as cell defaults:
//   sweep.problems = helmholtz, wave
//   sweep.families = tanh, bspline
//   sweep.archs    = A1
//   iterations     = 20000
SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep(const std::filesystem::path& path);

struct SweepCell {
  ExperimentConfig cfg;
  std::string status;  // "completed" | "diverged" | "error"
  std::string note;    // error detail when status == "error"
  std::vector<std::pair<std::string, double>> rel_l2;
  double t_it = 0;  // seconds per iteration
};

// Runs every (problem, family, arch) cell under root. Cell seeds are derived
// from the master seed and the cell index, so the sweep is reproducible yet
// cells stay independent. Failures mark the cell and the sweep carries on.
// Writes root/sweep.csv with one u / f / t_it row set per problem and one
// column per family x arch, "-" where a metric does not apply.
std::vector<SweepCell> run_sweep(const SweepSpec& sweep,
                                 const std::filesystem::path& root);

void write_sweep_csv(const std::filesystem::path& path,
                     const SweepSpec& sweep,
                     const std::vector<SweepCell>& cells);

}  // namespace pinnkan::exp
