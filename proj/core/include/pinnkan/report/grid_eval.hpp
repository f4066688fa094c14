#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "pinnkan/network/forward.hpp"
#include "pinnkan/problems/problems.hpp"
#include "pinnkan/report/cavity_reference.hpp"

namespace pinnkan::report {

// Dense evaluation of the trained fields against their references on a
// shared point lattice.
struct GridEval {
  int dim = 0;
  std::vector<double> coords;  // dim-strided evaluation points
  std::vector<std::string> fields;
  std::vector<std::vector<double>> pred;  // per field, aligned with coords
  std::vector<std::vector<double>> ref;

  std::size_t n_points() const {
    return dim ? coords.size() / static_cast<std::size_t>(dim) : 0;
  }
};

// Uniform grid with exact domain corners:
//   2-input problems: resolution x resolution nodes;
//   3-input problems: three time slices (first, mid, last frame of a
//   resolution-frame time grid) of resolution x resolution spatial nodes.
// Fields are the solution "u" and, where the benchmark reports one, the
// induced source "f". The cavity has no closed form; use eval_on_reference.
GridEval eval_on_grid(const prob::Problem& p, net::Forward& fwd,
                      const net::ParamStore& params, int resolution = 100);

// Cavity fields (u, v, p) on the reference lattice itself.
GridEval eval_on_reference(const prob::Problem& p, net::Forward& fwd,
                           const net::ParamStore& params,
                           const CavityReference& ref);

// Percent relative L2 per field, in field order.
std::vector<std::pair<std::string, double>> grid_errors(const GridEval& ge);

// "coords...,field,value" rows: predictions under the field name, reference
// values under "<field>_ref".
void write_field_csv(const std::filesystem::path& path, const prob::Problem& p,
                     const GridEval& ge);

std::array<const char*, 3> axis_names(const prob::Problem& p);

}  // namespace pinnkan::report
