#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/network/forward.hpp"
#include "pinnkan/problems/problems.hpp"

namespace pinnkan::diag {

// Seed of the fixed evaluation point sets, shared by every probe so spectra
// are comparable across model families and snapshots.
inline constexpr std::uint64_t kProbeSeed = 0xd1a6;

// Row i = gradient of output `field` at point i w.r.t. the parameters.
// Returns an n x |theta| row-major matrix.
std::vector<double> jacobian(net::Forward& fwd, ad::Tape& t,
                             std::span<const double> theta,
                             std::span<const double> pts, int dim,
                             int field = 0);

// K = J1 * J2^T (n1 x n2, row-major) with the pinned reduction order, so
// K is exactly symmetric whenever J1 and J2 are the same matrix.
std::vector<double> ntk_matrix(std::span<const double> j1,
                               std::span<const double> j2, int n1, int n2,
                               std::size_t n_theta);

// The n evaluation points of one loss term from a probe batch (the cavity
// boundary set interleaves lid and wall points).
std::vector<double> term_points(const prob::Problem& p, const prob::Batch& b,
                                prob::Term term);

struct NtkResult {
  int stage_iter = 0;
  prob::Term term = prob::Term::Phy;
  std::vector<double> eigenvalues;  // descending, zeros included
};

// Kernel spectra of every present loss term at each saved snapshot of a
// finished run; snapshots are discovered as snap_<iter>.ckpt files.
std::vector<NtkResult> ntk_spectrum_report(const std::filesystem::path& run_dir,
                                           const prob::Problem& p,
                                           int n_points = 128, int field = 0);

// One spectrum for an in-memory model.
NtkResult ntk_spectrum(const prob::Problem& p, net::Forward& fwd,
                       const net::ParamStore& params, prob::Term term,
                       int n_points = 128, int field = 0);

// "stage_iter,component,index,eigenvalue" with a 1-based index
void write_ntk_csv(const std::filesystem::path& path,
                   const std::vector<NtkResult>& rows);

}  // namespace pinnkan::diag
