#pragma once

#include <filesystem>
#include <vector>

namespace pinnkan::report {

// Reference flow fields ingested from a CSV with header "t,x,y,u,v,p": one
// row per grid node, forming a complete rectangular (t, x, y) lattice in any
// row order. Values are indexed as [(ti * nx) + xi) * ny + yi].
struct CavityReference {
  std::vector<double> ts, xs, ys;  // sorted unique coordinates
  std::vector<double> u, v, p;

  std::size_t n_nodes() const { return u.size(); }
  int nt() const { return static_cast<int>(ts.size()); }
  int nx() const { return static_cast<int>(xs.size()); }
  int ny() const { return static_cast<int>(ys.size()); }
};

// Throws ConfigError on a malformed header/row, duplicate nodes, or an
// incomplete lattice.
CavityReference load_cavity_reference(const std::filesystem::path& path);

}  // namespace pinnkan::report
