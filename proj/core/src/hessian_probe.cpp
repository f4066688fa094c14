#include "pinnkan/diag/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/common.hpp"
#include "pinnkan/diag/ntk.hpp"
#include "pinnkan/network/checkpoint.hpp"
#include "pinnkan/network/forward.hpp"
#include "pinnkan/rng.hpp"

namespace pinnkan::diag {

namespace fs = std::filesystem;

HessianProbe hessian_max_eig(const ad::GradFn& grad_at,
                             std::span<const double> theta,
                             std::uint64_t seed, int max_iters, double tol) {
  if (theta.empty()) throw ConfigError("empty parameter vector");
  Rng rng(seed);
  std::vector<double> v(theta.size());
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  double norm = std::sqrt(ad::dot_accum(v.data(), v.data(), v.size()));
  for (double& x : v) x /= norm;

  HessianProbe probe;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_iters; ++k) {
    auto hv = ad::hvp(grad_at, theta, v);
    double rq = ad::dot_accum(v.data(), hv.data(), v.size());
    probe.rq_trace.push_back(rq);
    probe.power_steps = k + 1;
    probe.lambda_max = rq;

    double hv_norm = std::sqrt(ad::dot_accum(hv.data(), hv.data(), hv.size()));
    if (hv_norm == 0.0) {
      probe.lambda_max = 0.0;
      probe.zero_hv = true;
      probe.converged = true;
      break;
    }
    if (std::abs(rq - prev) <= tol) {
      probe.converged = true;
      break;
    }
    prev = rq;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = hv[i] / hv_norm;
  }
  return probe;
}

std::vector<HessianTraceRow> hessian_trace_report(const fs::path& run_dir,
                                                  const prob::Problem& p,
                                                  int n_points, int max_iters,
                                                  double tol) {
  std::vector<HessianTraceRow> rows;
  auto batch = prob::diagnostic_batch(p, n_points, kProbeSeed);

  std::vector<std::pair<int, fs::path>> snaps;
  if (!fs::is_directory(run_dir))
    throw ConfigError("run directory not found: " + run_dir.string());
  for (const auto& e : fs::directory_iterator(run_dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("snap_", 0) != 0) continue;
    auto dot = name.find(".ckpt");
    if (dot == std::string::npos) continue;
    snaps.emplace_back(std::stoi(name.substr(5, dot - 5)), e.path());
  }
  std::sort(snaps.begin(), snaps.end());
  if (snaps.empty())
    throw ConfigError("no snapshots in " + run_dir.string());

  for (const auto& [iter, path] : snaps) {
    auto ckpt = net::load_checkpoint(path);
    net::Forward fwd(ckpt.spec);
    ad::Tape tape;
    for (prob::Term term : {prob::Term::Phy, prob::Term::Bc, prob::Term::Ic}) {
      if (!prob::has_term(p, term)) continue;
      auto grad_at = [&](std::span<const double> th) {
        tape.reset(th);
        auto loss = prob::term_loss(p, fwd, tape, batch, term);
        return tape.gradient(loss);
      };
      auto probe = hessian_max_eig(
          grad_at, ckpt.params.theta,
          mix_seed(kProbeSeed, static_cast<std::uint64_t>(term)), max_iters,
          tol);
      rows.push_back({iter, term, probe.lambda_max, probe.power_steps});
    }
  }
  return rows;
}

void write_hessian_csv(const fs::path& path,
                       const std::vector<HessianTraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "iter,component,lambda_max,power_steps\n";
  for (const auto& r : rows)
    out << r.iter << ',' << prob::term_name(r.term) << ','
        << fmt17(r.lambda_max) << ',' << r.power_steps << '\n';
}

}  // namespace pinnkan::diag
