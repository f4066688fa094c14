#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pinnkan/network/network.hpp"
#include "pinnkan/problems/problems.hpp"
#include "pinnkan/train/adam.hpp"

namespace pinnkan::train {

struct TrainConfig {
  prob::Problem problem;
  net::NetworkSpec net_spec;
  std::uint64_t seed = 0;
  int iterations = 60000;
  int batch_size = 128;
  int log_interval = 100;
  AdamParams adam;
  std::vector<int> snapshots;     // checkpoint iterations; empty = {0, N/2, N}
  std::filesystem::path out_dir;  // history, snapshots, final state
  bool resume = false;            // continue from out_dir's saved state
};

struct TrainResult {
  std::string status;  // "completed" | "diverged"
  net::ParamStore params;
  prob::LossBreakdown final_loss;   // last evaluated batch
  double initial_total = 0;         // first history row's total
  int last_iter = 0;                // iteration reached
  double mean_time_per_iter = 0;    // seconds, first 10 iterations excluded
  std::vector<int> snapshot_iters;  // written snapshots, ascending
};

// Snapshot schedule {0, N/2, N}, deduplicated.
std::vector<int> snapshot_schedule(int iterations);

// Runs the optimization loop: per iteration, a fresh uniformly resampled
// batch (generator seeded from (seed, iteration), so resumed runs replay the
// identical trajectory), loss assembly, backward pass, Adam step. Writes
// loss_history.csv, snap_<iter>.ckpt at schedule points, model.ckpt and
// adam.state. Divergence (non-finite loss/grads or total > 1e12) stops the
// run with status "diverged"; partial artifacts are kept.
TrainResult train(const TrainConfig& cfg);

// File names inside a run directory.
inline const char* kHistoryFile = "loss_history.csv";
inline const char* kModelFile = "model.ckpt";
inline const char* kAdamFile = "adam.state";
std::string snapshot_file(int iter);

}  // namespace pinnkan::train
