#include "pinnkan/report/cavity_reference.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "pinnkan/common.hpp"

namespace pinnkan::report {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = s.find_first_not_of(' ');
  return b == std::string::npos ? std::string() : s.substr(b);
}

int coord_index(const std::vector<double>& axis, double v,
                const std::filesystem::path& path) {
  auto it = std::lower_bound(axis.begin(), axis.end(), v);
  if (it == axis.end() || *it != v)
    throw ConfigError("inconsistent grid coordinate in " + path.string());
  return static_cast<int>(it - axis.begin());
}

}  // namespace

CavityReference load_cavity_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read reference file " + path.string());

  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,x,y,u,v,p")
    throw ConfigError("reference file " + path.string() +
                      " must start with header 't,x,y,u,v,p'");

  std::vector<std::array<double, 6>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::array<double, 6> r{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf%c", &r[0], &r[1],
                    &r[2], &r[3], &r[4], &r[5], &tail) != 6)
      throw ConfigError("malformed row " + std::to_string(line_no) + " in " +
                        path.string());
    rows.push_back(r);
  }
  if (rows.empty())
    throw ConfigError("reference file " + path.string() + " has no rows");

  CavityReference ref;
  auto collect = [&](int col, std::vector<double>& axis) {
    for (const auto& r : rows) axis.push_back(r[static_cast<std::size_t>(col)]);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  };
  collect(0, ref.ts);
  collect(1, ref.xs);
  collect(2, ref.ys);

  const std::size_t n = ref.ts.size() * ref.xs.size() * ref.ys.size();
  if (rows.size() != n)
    throw ConfigError("reference grid in " + path.string() +
                      " is not a complete lattice: " +
                      std::to_string(rows.size()) + " rows for " +
                      std::to_string(n) + " nodes");

  ref.u.assign(n, 0.0);
  ref.v.assign(n, 0.0);
  ref.p.assign(n, 0.0);
  std::vector<bool> seen(n, false);
  for (const auto& r : rows) {
    int ti = coord_index(ref.ts, r[0], path);
    int xi = coord_index(ref.xs, r[1], path);
    int yi = coord_index(ref.ys, r[2], path);
    std::size_t idx =
        (static_cast<std::size_t>(ti) * ref.xs.size() +
         static_cast<std::size_t>(xi)) *
            ref.ys.size() +
        static_cast<std::size_t>(yi);
    if (seen[idx])
      throw ConfigError("duplicate grid node in " + path.string());
    seen[idx] = true;
    ref.u[idx] = r[3];
    ref.v[idx] = r[4];
    ref.p[idx] = r[5];
  }
  return ref;
}

}  // namespace pinnkan::report
