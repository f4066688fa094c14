#include "pinnkan/report/grid_eval.hpp"

#include <fstream>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/common.hpp"
#include "pinnkan/report/metrics.hpp"

namespace pinnkan::report {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        i == 0 ? lo
               : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  return v;
}

void eval_fields(const prob::Problem& p, net::Forward& fwd,
                 const net::ParamStore& params, GridEval& ge) {
  const std::size_t n = ge.n_points();
  const int dim = ge.dim;

  ge.fields.push_back("u");
  std::vector<double> pred_u(n), ref_u(n);
  std::vector<double> out(static_cast<std::size_t>(
      fwd.spec().n_outputs()));
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = &ge.coords[i * static_cast<std::size_t>(dim)];
    fwd.value_pass(params, {x, static_cast<std::size_t>(dim)}, out);
    pred_u[i] = out[0];
    ref_u[i] = prob::exact_u(p, x);
  }
  ge.pred.push_back(std::move(pred_u));
  ge.ref.push_back(std::move(ref_u));

  if (prob::has_forcing_row(p.id)) {
    ge.fields.push_back("f");
    std::vector<double> pred_f(n), ref_f(n);
    ad::Tape t;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = &ge.coords[i * static_cast<std::size_t>(dim)];
      pred_f[i] = prob::induced_forcing(p, fwd, t, params, x);
      ref_f[i] = prob::eval_forcing_ref(p, x);
    }
    ge.pred.push_back(std::move(pred_f));
    ge.ref.push_back(std::move(ref_f));
  }
}

}  // namespace

std::array<const char*, 3> axis_names(const prob::Problem& p) {
  switch (p.id) {
    case prob::ProblemId::Helmholtz:
      return {"x", "y", ""};
    case prob::ProblemId::Wave:
    case prob::ProblemId::KleinGordon:
      return {"t", "x", ""};
    default:
      return {"t", "x", "y"};
  }
}

GridEval eval_on_grid(const prob::Problem& p, net::Forward& fwd,
                      const net::ParamStore& params, int resolution) {
  if (resolution < 2) throw ConfigError("grid resolution must be >= 2");
  if (p.id == prob::ProblemId::Cavity)
    throw ConfigError(
        "the cavity has no closed-form reference; evaluate against a "
        "reference file");

  GridEval ge;
  ge.dim = p.input_dim;
  if (p.input_dim == 2) {
    auto a0 = linspace(p.lo[0], p.hi[0], resolution);
    auto a1 = linspace(p.lo[1], p.hi[1], resolution);
    ge.coords.reserve(a0.size() * a1.size() * 2);
    for (double v0 : a0)
      for (double v1 : a1) {
        ge.coords.push_back(v0);
        ge.coords.push_back(v1);
      }
  } else {
    // first, middle and last frame of a `resolution`-frame time grid
    auto tgrid = linspace(p.lo[0], p.hi[0], resolution);
    int mid = 45 * (resolution - 1) / 99;
    auto ax = linspace(p.lo[1], p.hi[1], resolution);
    auto ay = linspace(p.lo[2], p.hi[2], resolution);
    for (int ti : {0, mid, resolution - 1})
      for (double x : ax)
        for (double y : ay) {
          ge.coords.push_back(tgrid[static_cast<std::size_t>(ti)]);
          ge.coords.push_back(x);
          ge.coords.push_back(y);
        }
  }
  eval_fields(p, fwd, params, ge);
  return ge;
}

GridEval eval_on_reference(const prob::Problem& p, net::Forward& fwd,
                           const net::ParamStore& params,
                           const CavityReference& ref) {
  if (p.id != prob::ProblemId::Cavity)
    throw ConfigError("reference-grid evaluation is a cavity feature");

  GridEval ge;
  ge.dim = 3;
  ge.fields = {"u", "v", "p"};
  const std::size_t n = ref.n_nodes();
  ge.coords.reserve(3 * n);
  ge.pred.assign(3, std::vector<double>(n));
  ge.ref = {ref.u, ref.v, ref.p};

  std::vector<double> out(3);
  std::size_t i = 0;
  for (double t : ref.ts)
    for (double x : ref.xs)
      for (double y : ref.ys) {
        ge.coords.push_back(t);
        ge.coords.push_back(x);
        ge.coords.push_back(y);
        const double pt[3] = {t, x, y};
        fwd.value_pass(params, pt, out);
        for (int k = 0; k < 3; ++k)
          ge.pred[static_cast<std::size_t>(k)][i] =
              out[static_cast<std::size_t>(k)];
        ++i;
      }
  return ge;
}

std::vector<std::pair<std::string, double>> grid_errors(const GridEval& ge) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t k = 0; k < ge.fields.size(); ++k)
    out.emplace_back(ge.fields[k], relative_l2(ge.pred[k], ge.ref[k]));
  return out;
}

void write_field_csv(const std::filesystem::path& path, const prob::Problem& p,
                     const GridEval& ge) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  auto names = axis_names(p);
  for (int a = 0; a < ge.dim; ++a) out << names[static_cast<std::size_t>(a)] << ',';
  out << "field,value\n";

  auto rows = [&](const std::string& field, const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      for (int a = 0; a < ge.dim; ++a)
        out << fmt17(
                   ge.coords[i * static_cast<std::size_t>(ge.dim) +
                             static_cast<std::size_t>(a)])
            << ',';
      out << field << ',' << fmt17(vals[i]) << '\n';
    }
  };
  for (std::size_t k = 0; k < ge.fields.size(); ++k) {
    rows(ge.fields[k], ge.pred[k]);
    rows(ge.fields[k] + "_ref", ge.ref[k]);
  }
}

}  // namespace pinnkan::report
