#include "pinnkan/diag/ntk.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include "pinnkan/common.hpp"
#include "pinnkan/diag/eigen.hpp"
#include "pinnkan/network/checkpoint.hpp"

namespace pinnkan::diag {

namespace fs = std::filesystem;

std::vector<double> jacobian(net::Forward& fwd, ad::Tape& t,
                             std::span<const double> theta,
                             std::span<const double> pts, int dim, int field) {
  if (dim <= 0 || pts.size() % static_cast<std::size_t>(dim) != 0)
    throw ConfigError("point buffer is not a whole number of points");
  const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
  if (n == 0) throw ConfigError("jacobian needs at least one point");

  std::vector<double> j(n * theta.size());
  for (std::size_t i = 0; i < n; ++i) {
    t.reset(theta);
    auto jets = fwd.jet_pass(
        t, pts.subspan(i * static_cast<std::size_t>(dim),
                       static_cast<std::size_t>(dim)),
        ad::JetPlan::none());
    auto g = t.gradient(jets[static_cast<std::size_t>(field)].v);
    std::copy(g.begin(), g.end(), j.begin() + static_cast<std::ptrdiff_t>(i * theta.size()));
  }
  return j;
}

std::vector<double> ntk_matrix(std::span<const double> j1,
                               std::span<const double> j2, int n1, int n2,
                               std::size_t n_theta) {
  if (j1.size() != static_cast<std::size_t>(n1) * n_theta ||
      j2.size() != static_cast<std::size_t>(n2) * n_theta)
    throw ConfigError("jacobian shapes do not match the kernel dimensions");
  std::vector<double> k(static_cast<std::size_t>(n1) *
                        static_cast<std::size_t>(n2));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      k[static_cast<std::size_t>(i * n2 + j)] =
          ad::dot_accum(&j1[static_cast<std::size_t>(i) * n_theta],
                        &j2[static_cast<std::size_t>(j) * n_theta], n_theta);
  return k;
}

std::vector<double> term_points(const prob::Problem& p, const prob::Batch& b,
                                prob::Term term) {
  const int dim = b.dim;
  if (p.id != prob::ProblemId::Cavity) {
    switch (term) {
      case prob::Term::Phy: return b.phy;
      case prob::Term::Bc: return b.bc;
      case prob::Term::Ic: return b.ic;
    }
  }
  switch (term) {
    case prob::Term::Phy: return b.phy;
    case prob::Term::Ic: return b.init;
    case prob::Term::Bc: {
      // half lid, half walls, same total as the other terms
      int n = static_cast<int>(b.lid.size()) / dim;
      int n_lid = (n + 1) / 2;
      std::vector<double> out(b.lid.begin(),
                              b.lid.begin() + n_lid * dim);
      out.insert(out.end(), b.walls.begin(),
                 b.walls.begin() + (n - n_lid) * dim);
      return out;
    }
  }
  throw ConfigError("unknown loss term");
}

NtkResult ntk_spectrum(const prob::Problem& p, net::Forward& fwd,
                       const net::ParamStore& params, prob::Term term,
                       int n_points, int field) {
  auto batch = prob::diagnostic_batch(p, n_points, kProbeSeed);
  auto pts = term_points(p, batch, term);
  ad::Tape t;
  auto j = jacobian(fwd, t, params.theta, pts, p.input_dim, field);
  const int n = static_cast<int>(pts.size()) / p.input_dim;
  auto k = ntk_matrix(j, j, n, n, params.size());
  NtkResult r;
  r.term = term;
  r.eigenvalues = sym_eigenvalues(std::move(k), n);
  return r;
}

namespace {

std::map<int, fs::path> find_snapshots(const fs::path& run_dir) {
  std::map<int, fs::path> snaps;
  if (!fs::is_directory(run_dir))
    throw ConfigError("run directory not found: " + run_dir.string());
  for (const auto& e : fs::directory_iterator(run_dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("snap_", 0) != 0) continue;
    auto dot = name.find(".ckpt");
    if (dot == std::string::npos) continue;
    snaps[std::stoi(name.substr(5, dot - 5))] = e.path();
  }
  if (snaps.empty())
    throw ConfigError("no snapshots in " + run_dir.string());
  return snaps;
}

}  // namespace

std::vector<NtkResult> ntk_spectrum_report(const fs::path& run_dir,
                                           const prob::Problem& p,
                                           int n_points, int field) {
  auto snaps = find_snapshots(run_dir);
  std::vector<NtkResult> out;
  for (const auto& [iter, path] : snaps) {
    auto ckpt = net::load_checkpoint(path);
    net::Forward fwd(ckpt.spec);
    for (prob::Term term :
         {prob::Term::Phy, prob::Term::Bc, prob::Term::Ic}) {
      if (!prob::has_term(p, term)) continue;
      auto r = ntk_spectrum(p, fwd, ckpt.params, term, n_points, field);
      r.stage_iter = iter;
      out.push_back(std::move(r));
    }
  }
  return out;
}

void write_ntk_csv(const fs::path& path, const std::vector<NtkResult>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "stage_iter,component,index,eigenvalue\n";
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
      out << r.stage_iter << ',' << prob::term_name(r.term) << ',' << i + 1
          << ',' << fmt17(r.eigenvalues[i]) << '\n';
}

}  // namespace pinnkan::diag
