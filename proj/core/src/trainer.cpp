#include "pinnkan/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/common.hpp"
#include "pinnkan/network/checkpoint.hpp"
#include "pinnkan/network/forward.hpp"

namespace pinnkan::train {

namespace fs = std::filesystem;

std::vector<int> snapshot_schedule(int iterations) {
  std::vector<int> s = {0, iterations / 2, iterations};
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::string snapshot_file(int iter) {
  return "snap_" + std::to_string(iter) + ".ckpt";
}

namespace {

constexpr double kDivergenceCap = 1e12;

void write_history_row(std::ofstream& out, bool cavity, int iter,
                       const prob::LossBreakdown& parts, double elapsed_s) {
  out << iter << ',' << fmt17(parts.total) << ',' << fmt17(parts.phy) << ','
      << fmt17(parts.bc) << ',' << fmt17(parts.ic);
  if (cavity) {
    out << ',' << fmt17(parts.ru) << ',' << fmt17(parts.rv) << ','
        << fmt17(parts.rc) << ',' << fmt17(parts.up) << ','
        << fmt17(parts.bc1) << ',' << fmt17(parts.u0);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", elapsed_s);
  out << ',' << buf << '\n';
  out.flush();
}

}  // namespace

TrainResult train(const TrainConfig& cfg) {
  if (cfg.iterations < 0) throw ConfigError("iterations must be >= 0");
  fs::create_directories(cfg.out_dir);
  const bool cavity = cfg.problem.id == prob::ProblemId::Cavity;

  net::ParamStore params;
  Adam adam(0);
  int start_iter = 0;
  const fs::path model_path = cfg.out_dir / kModelFile;
  const fs::path adam_path = cfg.out_dir / kAdamFile;

  if (cfg.resume && fs::exists(model_path) && fs::exists(adam_path)) {
    auto ckpt = net::load_checkpoint(model_path);
    if (net::param_count(ckpt.spec) != net::param_count(cfg.net_spec) ||
        ckpt.spec.family.family != cfg.net_spec.family.family)
      throw ConfigError("saved model does not match the configured network");
    params = std::move(ckpt.params);
    adam = Adam::load(adam_path, params.size());
    start_iter = static_cast<int>(adam.steps());
    if (start_iter > cfg.iterations)
      throw ConfigError("saved run is already past the requested iterations");
  } else {
    params = net::xavier_init(cfg.net_spec, cfg.seed);
    adam = Adam(params.size(), cfg.adam);
  }

  net::Forward fwd(cfg.net_spec);
  ad::Tape tape;

  const fs::path hist_path = cfg.out_dir / kHistoryFile;
  const bool append = start_iter > 0 && fs::exists(hist_path);
  std::ofstream hist(hist_path,
                     append ? std::ios::app : std::ios::trunc);
  if (!hist) throw ConfigError("cannot write " + hist_path.string());
  if (!append) {
    hist << "iter,total,L_phy,L_bc,L_ic";
    if (cavity) hist << ",L_ru,L_rv,L_rc,L_up,L_bc1,L_u0";
    hist << ",time_s\n";
  }

  std::vector<int> snaps = cfg.snapshots.empty()
                               ? snapshot_schedule(cfg.iterations)
                               : cfg.snapshots;
  if (!cfg.snapshots.empty()) {
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    if (snaps.front() < 0 || snaps.back() > cfg.iterations)
      throw ConfigError("snapshot iterations must lie in [0, " +
                        std::to_string(cfg.iterations) + "]");
  }
  auto save_snapshot = [&](int iter) {
    net::save_checkpoint(cfg.out_dir / snapshot_file(iter), cfg.net_spec,
                         params);
  };

  TrainResult res;
  res.status = "completed";
  res.last_iter = start_iter;

  auto wall_start = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         wall_start)
        .count();
  };

  double time_sum = 0.0;
  int timed_iters = 0;
  bool first_row = true;

  auto eval_batch = [&](int iter) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(iter)));
    prob::Batch batch = prob::sample_batch(cfg.problem, cfg.batch_size, rng);
    tape.reset(params.theta);
    return prob::assemble_loss(cfg.problem, fwd, tape, batch);
  };

  int k = start_iter;
  try {
    for (; k < cfg.iterations; ++k) {
      if (std::binary_search(snaps.begin(), snaps.end(), k)) save_snapshot(k);

      auto it_start = std::chrono::steady_clock::now();
      prob::LossResult lr = eval_batch(k);
      res.final_loss = lr.parts;
      if (first_row) {
        res.initial_total = lr.parts.total;
        first_row = false;
      }
      const bool blown =
          !std::isfinite(lr.parts.total) || lr.parts.total > kDivergenceCap;
      if (k % cfg.log_interval == 0 || blown)
        write_history_row(hist, cavity, k, lr.parts, elapsed());
      if (blown) {
        res.status = "diverged";
        res.last_iter = k;
        break;
      }

      auto grads = tape.gradient(lr.total);
      adam.step(params.theta, grads);
      res.last_iter = k + 1;

      double dt = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - it_start)
                      .count();
      if (k - start_iter >= 10 || cfg.iterations - start_iter <= 10) {
        time_sum += dt;
        ++timed_iters;
      }
    }

    if (res.status == "completed") {
      // closing evaluation; no step follows
      prob::LossResult lr = eval_batch(cfg.iterations);
      res.final_loss = lr.parts;
      if (first_row) {
        res.initial_total = lr.parts.total;
        first_row = false;
      }
      if (!std::isfinite(lr.parts.total) || lr.parts.total > kDivergenceCap)
        res.status = "diverged";
      write_history_row(hist, cavity, cfg.iterations, lr.parts, elapsed());
      res.last_iter = cfg.iterations;
      if (std::binary_search(snaps.begin(), snaps.end(), cfg.iterations))
        save_snapshot(cfg.iterations);
    }
  } catch (const NumericError&) {
    res.status = "diverged";
    res.last_iter = k;
  }

  res.mean_time_per_iter = timed_iters > 0 ? time_sum / timed_iters : 0.0;
  res.params = params;
  res.snapshot_iters.clear();
  for (int s : snaps)
    if (fs::exists(cfg.out_dir / snapshot_file(s))) res.snapshot_iters.push_back(s);

  net::save_checkpoint(model_path, cfg.net_spec, params);
  adam.save(adam_path);
  return res;
}

}  // namespace pinnkan::train
