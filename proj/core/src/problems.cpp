#include "pinnkan/problems/problems.hpp"

#include <cmath>
#include <numbers>

#include "pinnkan/common.hpp"

namespace pinnkan::prob {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHelmAlpha = 17.0 * kPi * kPi;  // (a1^2 + a2^2) pi^2

using ad::Jet;
using ad::JetPlan;
using ad::Tape;
using ad::Value;

}  // namespace

const char* problem_name(ProblemId id) {
  switch (id) {
    case ProblemId::Wave:        return "wave";
    case ProblemId::Helmholtz:   return "helmholtz";
    case ProblemId::KleinGordon: return "klein_gordon";
    case ProblemId::ConvDiff:    return "conv_diff";
    case ProblemId::Cavity:      return "cavity";
  }
  return "?";
}

ProblemId problem_from_name(const std::string& name) {
  for (ProblemId id : {ProblemId::Wave, ProblemId::Helmholtz,
                       ProblemId::KleinGordon, ProblemId::ConvDiff,
                       ProblemId::Cavity}) {
    if (name == problem_name(id)) return id;
  }
  throw ConfigError(
      "unknown problem '" + name +
      "' (valid: wave, helmholtz, klein_gordon, conv_diff, cavity)");
}

Problem make_problem(ProblemId id) {
  Problem p{};
  p.id = id;
  switch (id) {
    case ProblemId::Wave:
      p.input_dim = 2;
      p.output_dim = 1;
      p.lo = {0.0, 0.0, 0.0};
      p.hi = {1.0, 1.0, 0.0};
      p.lam_phy = 1.0;
      p.lam_bc = 100.0;
      p.lam_ic = 100.0;
      p.has_ic = true;
      break;
    case ProblemId::Helmholtz:
      p.input_dim = 2;
      p.output_dim = 1;
      p.lo = {-1.0, -1.0, 0.0};
      p.hi = {1.0, 1.0, 0.0};
      p.lam_phy = 1.0;
      p.lam_bc = 10.0;
      p.lam_ic = 0.0;
      p.has_ic = false;
      break;
    case ProblemId::KleinGordon:
      p.input_dim = 2;
      p.output_dim = 1;
      p.lo = {0.0, 0.0, 0.0};
      p.hi = {1.0, 1.0, 0.0};
      p.lam_phy = 1.0;
      p.lam_bc = 50.0;
      p.lam_ic = 50.0;
      p.has_ic = true;
      break;
    case ProblemId::ConvDiff:
      p.input_dim = 3;
      p.output_dim = 1;
      p.lo = {0.0, 0.0, 0.0};
      p.hi = {1.0, 1.0, 1.0};
      p.lam_phy = 1.0;
      p.lam_bc = 10.0;
      p.lam_ic = 10.0;
      p.has_ic = true;
      break;
    case ProblemId::Cavity:
      p.input_dim = 3;
      p.output_dim = 3;
      p.lo = {0.0, 0.0, 0.0};
      p.hi = {10.0, 1.0, 1.0};
      p.lam_phy = 0.1;
      p.lam_bc = 2.0;
      p.lam_ic = 4.0;
      p.has_ic = true;
      break;
  }
  return p;
}

double exact_u(const Problem& p, const double* x) {
  switch (p.id) {
    case ProblemId::Wave: {
      double t = x[0], xx = x[1];
      return std::sin(kPi * xx) * std::cos(2.0 * kPi * t) +
             0.5 * std::sin(4.0 * kPi * xx) * std::cos(8.0 * kPi * t);
    }
    case ProblemId::Helmholtz:
      return std::sin(kPi * x[0]) * std::sin(4.0 * kPi * x[1]);
    case ProblemId::KleinGordon: {
      double t = x[0], xx = x[1];
      return xx * std::cos(5.0 * kPi * t) + (t * xx) * (t * xx) * (t * xx);
    }
    case ProblemId::ConvDiff: {
      double sx = x[1] - 0.5, sy = x[2] - 0.5;
      return std::exp(-100.0 * (sx * sx + sy * sy)) * std::exp(-x[0]);
    }
    case ProblemId::Cavity:
      throw NumericError("no closed-form reference; supply reference file");
  }
  return 0.0;
}

double forcing(const Problem& p, const double* x) {
  if (p.paper_literal_forcing) return 0.0;
  switch (p.id) {
    case ProblemId::Helmholtz: {
      // source of the original-form operator u_xx + u_yy + k^2 u. The
      // homogeneous rewrite (coefficient 17 pi^2, zero source) makes the
      // reference an eigenfunction: every multiple of it, including zero,
      // is then a global optimum, and training collapses to zero.
      double k = Problem::kHelmK;
      return exact_u(p, x) * (k * k - kHelmAlpha);
    }
    case ProblemId::KleinGordon: {
      double t = x[0], xx = x[1];
      double u = exact_u(p, x);
      // u_tt - u_xx + u^3 of the stated reference
      return -25.0 * kPi * kPi * xx * std::cos(5.0 * kPi * t) +
             6.0 * t * xx * xx * xx - 6.0 * t * t * t * xx + u * u * u;
    }
    case ProblemId::ConvDiff: {
      double sx = x[1] - 0.5, sy = x[2] - 0.5;
      double u = exact_u(p, x);
      return u * (3.0 - 200.0 * (sx + sy) -
                  400.0 * (sx * sx + sy * sy));
    }
    default:
      return 0.0;
  }
}

bool has_forcing_row(ProblemId id) {
  return id == ProblemId::Helmholtz || id == ProblemId::KleinGordon ||
         id == ProblemId::ConvDiff;
}

double eval_forcing_ref(const Problem& p, const double* x) {
  switch (p.id) {
    case ProblemId::Helmholtz:
    case ProblemId::KleinGordon:
    case ProblemId::ConvDiff: {
      Problem q = p;
      q.paper_literal_forcing = false;
      return forcing(q, x);
    }
    default:
      throw NumericError(std::string("problem '") + problem_name(p.id) +
                         "' has no forcing field");
  }
}

double exact_residual(const Problem& p, const double* x) {
  switch (p.id) {
    case ProblemId::Wave: {
      double t = x[0], xx = x[1];
      double s1 = std::sin(kPi * xx), c1 = std::cos(2.0 * kPi * t);
      double s2 = std::sin(4.0 * kPi * xx), c2 = std::cos(8.0 * kPi * t);
      double utt = -4.0 * kPi * kPi * s1 * c1 - 32.0 * kPi * kPi * s2 * c2;
      double uxx = -kPi * kPi * s1 * c1 - 8.0 * kPi * kPi * s2 * c2;
      return utt - Problem::kWaveC2 * uxx;
    }
    case ProblemId::Helmholtz: {
      double u = exact_u(p, x);
      double uxx = -kPi * kPi * u;
      double uyy = -16.0 * kPi * kPi * u;
      double coef = p.paper_literal_forcing ? kHelmAlpha
                                            : Problem::kHelmK * Problem::kHelmK;
      return uxx + uyy + coef * u - forcing(p, x);
    }
    case ProblemId::KleinGordon: {
      double t = x[0], xx = x[1];
      double u = exact_u(p, x);
      double utt = -25.0 * kPi * kPi * xx * std::cos(5.0 * kPi * t) +
                   6.0 * t * xx * xx * xx;
      double uxx = 6.0 * t * t * t * xx;
      return utt - uxx + u * u * u - forcing(p, x);
    }
    case ProblemId::ConvDiff: {
      double sx = x[1] - 0.5, sy = x[2] - 0.5;
      double u = exact_u(p, x);
      double ut = -u;
      double ux = -200.0 * sx * u, uy = -200.0 * sy * u;
      double uxx = (40000.0 * sx * sx - 200.0) * u;
      double uyy = (40000.0 * sy * sy - 200.0) * u;
      return ut + Problem::kConvC1 * ux + Problem::kConvC2 * uy -
             Problem::kConvD * (uxx + uyy) - forcing(p, x);
    }
    case ProblemId::Cavity:
      throw NumericError("no closed-form reference; supply reference file");
  }
  return 0.0;
}

ad::JetPlan interior_plan(const Problem& p) {
  JetPlan plan;
  switch (p.id) {
    case ProblemId::Wave:
    case ProblemId::KleinGordon:
      plan.add(0, 2).add(1, 2);
      break;
    case ProblemId::Helmholtz:
      plan.add(0, 2).add(1, 2);
      break;
    case ProblemId::ConvDiff:
    case ProblemId::Cavity:
      plan.add(0, 1).add(1, 2).add(2, 2);
      break;
  }
  return plan;
}

namespace {

// face descriptor: coordinate index pinned to a value
struct Face {
  int coord;
  double value;
};

void sample_points(const Problem& p, int n, Rng& rng, const Face* face,
                   std::vector<double>& out) {
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < p.input_dim; ++d) {
      if (face && face->coord == d)
        out.push_back(face->value);
      else
        out.push_back(rng.uniform(p.lo[static_cast<size_t>(d)],
                                  p.hi[static_cast<size_t>(d)]));
    }
  }
}

// split n across k pieces, remainder to the leading pieces
int piece_count(int n, int k, int i) { return n / k + (i < n % k ? 1 : 0); }

}  // namespace

Batch sample_batch(const Problem& p, int batch_size, Rng& rng) {
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  Batch b;
  b.dim = p.input_dim;
  sample_points(p, batch_size, rng, nullptr, b.phy);

  auto add_faces = [&](std::span<const Face> faces, std::vector<double>& dst) {
    int k = static_cast<int>(faces.size());
    for (int i = 0; i < k; ++i) {
      Face f = faces[static_cast<size_t>(i)];
      sample_points(p, piece_count(batch_size, k, i), rng, &f, dst);
    }
  };

  switch (p.id) {
    case ProblemId::Wave:
    case ProblemId::KleinGordon: {
      const Face faces[] = {{1, 0.0}, {1, 1.0}};
      add_faces(faces, b.bc);
      Face t0{0, 0.0};
      sample_points(p, batch_size, rng, &t0, b.ic);
      break;
    }
    case ProblemId::Helmholtz: {
      const Face faces[] = {{0, -1.0}, {0, 1.0}, {1, -1.0}, {1, 1.0}};
      add_faces(faces, b.bc);
      break;
    }
    case ProblemId::ConvDiff: {
      const Face faces[] = {{1, 0.0}, {1, 1.0}, {2, 0.0}, {2, 1.0}};
      add_faces(faces, b.bc);
      Face t0{0, 0.0};
      sample_points(p, batch_size, rng, &t0, b.ic);
      break;
    }
    case ProblemId::Cavity: {
      Face lid{2, 1.0};
      sample_points(p, batch_size, rng, &lid, b.lid);
      const Face walls[] = {{2, 0.0}, {1, 0.0}, {1, 1.0}};
      add_faces(walls, b.walls);
      Face t0{0, 0.0};
      sample_points(p, batch_size, rng, &t0, b.init);
      break;
    }
  }

  if (p.id != ProblemId::Cavity) {
    for (int i = 0; i < static_cast<int>(b.bc.size()) / b.dim; ++i)
      b.bc_target.push_back(exact_u(p, &b.bc[static_cast<size_t>(i * b.dim)]));
    for (int i = 0; i < static_cast<int>(b.ic.size()) / b.dim; ++i)
      b.ic_target.push_back(exact_u(p, &b.ic[static_cast<size_t>(i * b.dim)]));
  }
  return b;
}

namespace {

// Mean of squares as one structured self-dot: the residuals are copied into
// a contiguous node block so the reduction is a single kernel with a pinned
// order, and its backward sweep is one pass.
Value mean_squares(Tape& t, const std::vector<Value>& rs) {
  auto n = static_cast<std::int32_t>(rs.size());
  auto x0 = static_cast<std::int32_t>(t.size());
  for (const Value& r : rs) t.u1(ad::Op::Scale, r, t.val(r), 1.0);
  Value ss = t.dot(x0, x0, n);
  return ss * (1.0 / static_cast<double>(n));
}

const double* pt(const std::vector<double>& v, int dim, int i) {
  return &v[static_cast<size_t>(i * dim)];
}

void need(bool nonempty, const Problem& p, const char* what) {
  if (!nonempty)
    throw ConfigError(std::string("empty ") + what +
                      " loss component in batch for '" + problem_name(p.id) +
                      "'");
}

std::vector<std::vector<Value>> values_at(net::Forward& fwd, Tape& t, int dim,
                                          const std::vector<double>& pts,
                                          int out_count) {
  std::vector<std::vector<Value>> per_field(static_cast<size_t>(out_count));
  int m = static_cast<int>(pts.size()) / dim;
  for (int i = 0; i < m; ++i) {
    auto jets = fwd.jet_pass(t, {pt(pts, dim, i), static_cast<size_t>(dim)},
                             JetPlan::none());
    for (int k = 0; k < out_count; ++k)
      per_field[static_cast<size_t>(k)].push_back(
          jets[static_cast<size_t>(k)].v);
  }
  return per_field;
}

struct CavityPhy {
  Value ru, rv, rc;
};

CavityPhy cavity_phy_terms(const Problem& p, net::Forward& fwd, Tape& t,
                           const Batch& batch) {
  need(!batch.phy.empty(), p, "interior");
  std::vector<Value> ru, rv, rc;
  JetPlan plan = interior_plan(p);
  for (int i = 0; i < batch.n_phy(); ++i) {
    auto jets = fwd.jet_pass(t, {pt(batch.phy, batch.dim, i), 3}, plan);
    const Jet &u = jets[0], &v = jets[1], &q = jets[2];
    Value conv_u = u.d1[0] + u.v * u.d1[1] + v.v * u.d1[2];
    Value conv_v = v.d1[0] + u.v * v.d1[1] + v.v * v.d1[2];
    ru.push_back(conv_u + q.d1[1] * (1.0 / Problem::kCavityRho) -
                 (u.d2[1] + u.d2[2]) * Problem::kCavityMu);
    rv.push_back(conv_v + q.d1[2] * (1.0 / Problem::kCavityRho) -
                 (v.d2[1] + v.d2[2]) * Problem::kCavityMu);
    rc.push_back(u.d1[1] + v.d1[2]);
  }
  return {mean_squares(t, ru), mean_squares(t, rv), mean_squares(t, rc)};
}

struct CavityBc {
  Value up, bc1;
};

CavityBc cavity_bc_terms(const Problem& p, net::Forward& fwd, Tape& t,
                         const Batch& batch) {
  need(!batch.lid.empty(), p, "lid");
  need(!batch.walls.empty(), p, "wall");
  auto lid_f = values_at(fwd, t, batch.dim, batch.lid, 2);
  for (Value& v : lid_f[0]) v = v - Problem::kCavityLid;  // 1 - u, squared
  Value up = mean_squares(t, lid_f[0]) + mean_squares(t, lid_f[1]);
  auto wall_f = values_at(fwd, t, batch.dim, batch.walls, 2);
  Value bc1 = mean_squares(t, wall_f[0]) + mean_squares(t, wall_f[1]);
  return {up, bc1};
}

Value cavity_ic_term(const Problem& p, net::Forward& fwd, Tape& t,
                     const Batch& batch) {
  need(!batch.init.empty(), p, "initial");
  auto init_f = values_at(fwd, t, batch.dim, batch.init, 3);
  return mean_squares(t, init_f[0]) + mean_squares(t, init_f[1]) +
         mean_squares(t, init_f[2]);
}

Value scalar_phy_term(const Problem& p, net::Forward& fwd, Tape& t,
                      const Batch& batch) {
  need(!batch.phy.empty(), p, "interior");
  std::vector<Value> rphy;
  JetPlan plan = interior_plan(p);
  const int dim = batch.dim;
  for (int i = 0; i < batch.n_phy(); ++i) {
    const double* x = pt(batch.phy, dim, i);
    auto jets = fwd.jet_pass(t, {x, static_cast<size_t>(dim)}, plan);
    const Jet& j = jets[0];
    switch (p.id) {
      case ProblemId::Wave:
        rphy.push_back(j.d2[0] - j.d2[1] * Problem::kWaveC2);
        break;
      case ProblemId::Helmholtz: {
        double coef = p.paper_literal_forcing
                          ? kHelmAlpha
                          : Problem::kHelmK * Problem::kHelmK;
        rphy.push_back(j.d2[0] + j.d2[1] + j.v * coef - forcing(p, x));
        break;
      }
      case ProblemId::KleinGordon:
        rphy.push_back(j.d2[0] - j.d2[1] + j.v * j.v * j.v - forcing(p, x));
        break;
      case ProblemId::ConvDiff:
        rphy.push_back(j.d1[0] + j.d1[1] * Problem::kConvC1 +
                       j.d1[2] * Problem::kConvC2 -
                       (j.d2[1] + j.d2[2]) * Problem::kConvD - forcing(p, x));
        break;
      case ProblemId::Cavity:
        break;  // separate builder
    }
  }
  return mean_squares(t, rphy);
}

Value scalar_bc_term(const Problem& p, net::Forward& fwd, Tape& t,
                     const Batch& batch) {
  need(!batch.bc.empty(), p, "boundary");
  const int dim = batch.dim;
  std::vector<Value> rbc;
  for (int i = 0; i < batch.n_bc(); ++i) {
    auto jets = fwd.jet_pass(
        t, {pt(batch.bc, dim, i), static_cast<size_t>(dim)}, JetPlan::none());
    rbc.push_back(jets[0].v - batch.bc_target[static_cast<size_t>(i)]);
  }
  return mean_squares(t, rbc);
}

Value scalar_ic_term(const Problem& p, net::Forward& fwd, Tape& t,
                     const Batch& batch) {
  need(!batch.ic.empty(), p, "initial");
  // initial value everywhere; wave and klein-gordon also pin u_t(0,x) = 0
  const bool needs_velocity =
      p.id == ProblemId::Wave || p.id == ProblemId::KleinGordon;
  const int dim = batch.dim;
  std::vector<Value> rval, rvel;
  JetPlan ic_plan = needs_velocity ? JetPlan::single(0, 1) : JetPlan::none();
  for (int i = 0; i < batch.n_ic(); ++i) {
    auto jets = fwd.jet_pass(
        t, {pt(batch.ic, dim, i), static_cast<size_t>(dim)}, ic_plan);
    rval.push_back(jets[0].v - batch.ic_target[static_cast<size_t>(i)]);
    if (needs_velocity) rvel.push_back(jets[0].d1[0]);
  }
  Value ic = mean_squares(t, rval);
  if (needs_velocity) ic = ic + mean_squares(t, rvel);
  return ic;
}

}  // namespace

const char* term_name(Term term) {
  switch (term) {
    case Term::Phy: return "phy";
    case Term::Bc: return "bc";
    case Term::Ic: return "ic";
  }
  return "?";
}

bool has_term(const Problem& p, Term term) {
  return term != Term::Ic || p.has_ic;
}

Value term_loss(const Problem& p, net::Forward& fwd, Tape& t,
                const Batch& batch, Term term) {
  if (batch.dim != p.input_dim)
    throw ConfigError("batch dimension does not match the problem");
  if (!has_term(p, term))
    throw ConfigError(std::string("problem '") + problem_name(p.id) +
                      "' has no " + term_name(term) + " loss term");
  if (p.id == ProblemId::Cavity) {
    switch (term) {
      case Term::Phy: {
        auto c = cavity_phy_terms(p, fwd, t, batch);
        return c.ru + c.rv + c.rc;
      }
      case Term::Bc: {
        auto c = cavity_bc_terms(p, fwd, t, batch);
        return c.up + c.bc1;
      }
      case Term::Ic:
        return cavity_ic_term(p, fwd, t, batch);
    }
  }
  switch (term) {
    case Term::Phy: return scalar_phy_term(p, fwd, t, batch);
    case Term::Bc: return scalar_bc_term(p, fwd, t, batch);
    case Term::Ic: return scalar_ic_term(p, fwd, t, batch);
  }
  throw ConfigError("unknown loss term");
}

LossResult assemble_loss(const Problem& p, net::Forward& fwd, Tape& t,
                         const Batch& batch) {
  if (batch.dim != p.input_dim)
    throw ConfigError("batch dimension does not match the problem");

  if (p.id == ProblemId::Cavity) {
    auto [Lru, Lrv, Lrc] = cavity_phy_terms(p, fwd, t, batch);
    auto [Lup, Lbc1] = cavity_bc_terms(p, fwd, t, batch);
    Value Lu0 = cavity_ic_term(p, fwd, t, batch);

    Value phy = Lru + Lrv + Lrc;
    Value bc = Lup + Lbc1;
    Value total = phy * p.lam_phy + bc * p.lam_bc + Lu0 * p.lam_ic;

    LossResult res{total, {}};
    res.parts.cavity = true;
    res.parts.ru = t.val(Lru);
    res.parts.rv = t.val(Lrv);
    res.parts.rc = t.val(Lrc);
    res.parts.up = t.val(Lup);
    res.parts.bc1 = t.val(Lbc1);
    res.parts.u0 = t.val(Lu0);
    res.parts.phy = t.val(phy);
    res.parts.bc = t.val(bc);
    res.parts.ic = res.parts.u0;
    res.parts.total = t.val(total);
    return res;
  }

  Value phy = scalar_phy_term(p, fwd, t, batch);
  Value bc = scalar_bc_term(p, fwd, t, batch);
  Value total = phy * p.lam_phy + bc * p.lam_bc;

  LossResult res{total, {}};
  if (p.has_ic) {
    Value ic = scalar_ic_term(p, fwd, t, batch);
    total = total + ic * p.lam_ic;
    res.parts.ic = t.val(ic);
  }

  res.total = total;
  res.parts.phy = t.val(phy);
  res.parts.bc = t.val(bc);
  res.parts.total = t.val(total);
  return res;
}

Batch diagnostic_batch(const Problem& p, int n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(p.id)));
  return sample_batch(p, n, rng);
}

double induced_forcing(const Problem& p, net::Forward& fwd, Tape& t,
                       const net::ParamStore& params, const double* x) {
  t.reset(params.theta);
  switch (p.id) {
    case ProblemId::Helmholtz: {
      JetPlan plan;
      plan.add(0, 2).add(1, 2);
      auto jets = fwd.jet_pass(t, {x, 2}, plan);
      const Jet& j = jets[0];
      double k = Problem::kHelmK;
      return t.val(j.d2[0]) + t.val(j.d2[1]) + k * k * t.val(j.v);
    }
    case ProblemId::KleinGordon: {
      JetPlan plan;
      plan.add(0, 2).add(1, 2);
      auto jets = fwd.jet_pass(t, {x, 2}, plan);
      const Jet& j = jets[0];
      double u = t.val(j.v);
      return t.val(j.d2[0]) - t.val(j.d2[1]) + u * u * u;
    }
    case ProblemId::ConvDiff: {
      JetPlan plan;
      plan.add(0, 1).add(1, 2).add(2, 2);
      auto jets = fwd.jet_pass(t, {x, 3}, plan);
      const Jet& j = jets[0];
      return t.val(j.d1[0]) + Problem::kConvC1 * t.val(j.d1[1]) +
             Problem::kConvC2 * t.val(j.d1[2]) -
             Problem::kConvD * (t.val(j.d2[1]) + t.val(j.d2[2]));
    }
    default:
      throw NumericError(std::string("problem '") + problem_name(p.id) +
                         "' has no forcing field");
  }
}

}  // namespace pinnkan::prob
