#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pinnkan/autodiff/hvp.hpp"
#include "pinnkan/problems/problems.hpp"

namespace pinnkan::diag {

struct HessianProbe {
  double lambda_max = 0;  // signed Rayleigh quotient of the final iterate
  int power_steps = 0;
  bool converged = false;
  bool zero_hv = false;          // H v vanished; lambda_max reported as 0
  std::vector<double> rq_trace;  // Rayleigh quotient per step
};

// Dominant Hessian eigenvalue by power iteration over finite-difference
// Hessian-vector products. The quotient's sign is kept (not its modulus),
// so negative curvature is reportable.
HessianProbe hessian_max_eig(const ad::GradFn& grad_at,
                             std::span<const double> theta,
                             std::uint64_t seed, int max_iters = 100,
                             double tol = 1e-6);

struct HessianTraceRow {
  int iter = 0;
  prob::Term term = prob::Term::Phy;
  double lambda_max = 0;
  int power_steps = 0;
};

// lambda_max of each loss term at every saved snapshot of a run, each on a
// fixed seeded 512-point evaluation set.
std::vector<HessianTraceRow> hessian_trace_report(
    const std::filesystem::path& run_dir, const prob::Problem& p,
    int n_points = 512, int max_iters = 100, double tol = 1e-6);

// "iter,component,lambda_max,power_steps"
void write_hessian_csv(const std::filesystem::path& path,
                       const std::vector<HessianTraceRow>& rows);

}  // namespace pinnkan::diag
