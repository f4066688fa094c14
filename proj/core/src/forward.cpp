#include "pinnkan/network/forward.hpp"

#include <cmath>

#include "pinnkan/common.hpp"

namespace pinnkan::net {

using ad::Jet;
using ad::JetPlan;
using ad::Op;
using ad::Tape;
using ad::Value;

namespace {

// Channel indices inside a block: 0 is the value channel, then one first
// derivative channel per axis, then second-derivative channels for the
// axes tracked to order 2.
struct ChanMap {
  int n_chan = 1;
  int n_axes = 0;
  std::array<int, 3> d1c{};
  std::array<int, 3> d2c{{-1, -1, -1}};
  int max_order = 0;

  explicit ChanMap(const JetPlan& p) {
    n_axes = p.n_axes;
    int c = 1;
    for (int a = 0; a < p.n_axes; ++a) d1c[static_cast<std::size_t>(a)] = c++;
    for (int a = 0; a < p.n_axes; ++a) {
      if (p.axes[static_cast<std::size_t>(a)].order >= 2) {
        d2c[static_cast<std::size_t>(a)] = c++;
        max_order = 2;
      } else if (max_order < 1) {
        max_order = 1;
      }
    }
    if (p.n_axes > 0 && max_order == 0) max_order = 1;
    n_chan = c;
  }
};

}  // namespace

Forward::Forward(const NetworkSpec& spec)
    : spec_(spec), layout_(ParamLayout::build(spec)) {
  if (spec.widths.size() < 2)
    throw ConfigError("network needs at least two widths");
  for (int w : spec.widths)
    if (w <= 0) throw ConfigError("network widths must be positive");
  if (!basis::is_mlp(spec.family.family)) be_.emplace(spec.family);
}

std::vector<Jet> Forward::jet_pass(Tape& t, std::span<const double> x,
                                   const JetPlan& plan) {
  if (static_cast<int>(x.size()) != spec_.n_inputs())
    throw ConfigError("input size mismatch");
  if (t.n_params() != static_cast<int>(layout_.total))
    throw NumericError("tape was not seeded with this network's parameters");
  for (int a = 0; a < plan.n_axes; ++a) {
    int ax = plan.axes[static_cast<std::size_t>(a)].input;
    if (ax < 0 || ax >= spec_.n_inputs())
      throw ConfigError("derivative axis out of range");
  }

  const ChanMap cm(plan);
  const bool mlp = basis::is_mlp(spec_.family.family);
  const bool ptanh = spec_.family.family == basis::Family::ParamTanh;
  const bool fourier = spec_.family.family == basis::Family::Fourier;
  const bool blend = spec_.family.silu_blend &&
                     spec_.family.family == basis::Family::BSpline;
  const int L = spec_.n_layers();
  const int n0 = spec_.n_inputs();

  // Input coordinates as channel-major blocks, with jet views onto them.
  Blocks curb;
  curb.len = n0;
  for (int c = 0; c < cm.n_chan; ++c) {
    curb.start[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(t.size());
    for (int i = 0; i < n0; ++i) {
      if (c == 0) {
        t.input(x[static_cast<std::size_t>(i)]);
      } else {
        double v = 0.0;
        for (int a = 0; a < cm.n_axes; ++a)
          if (cm.d1c[static_cast<std::size_t>(a)] == c &&
              plan.axes[static_cast<std::size_t>(a)].input == i)
            v = 1.0;
        t.constant(v);
      }
    }
  }
  jcur_.resize(static_cast<std::size_t>(n0));
  for (int i = 0; i < n0; ++i) {
    Jet& j = jcur_[static_cast<std::size_t>(i)];
    j.v = Value{curb.start[0] + i, &t};
    for (int a = 0; a < cm.n_axes; ++a) {
      j.d1[static_cast<std::size_t>(a)] =
          Value{curb.start[static_cast<std::size_t>(cm.d1c[static_cast<std::size_t>(a)])] + i, &t};
      if (cm.d2c[static_cast<std::size_t>(a)] >= 0)
        j.d2[static_cast<std::size_t>(a)] =
            Value{curb.start[static_cast<std::size_t>(cm.d2c[static_cast<std::size_t>(a)])] + i, &t};
    }
  }

  auto pleaf = [&](std::size_t idx) {
    return Value{static_cast<std::int32_t>(idx), &t};
  };

  for (int l = 0; l < L; ++l) {
    const int n_in = spec_.widths[static_cast<std::size_t>(l)];
    const int n_out = spec_.widths[static_cast<std::size_t>(l) + 1];

    if (mlp) {
      const ParamBlock& wb = layout_.find(BlockRole::Weight, l);
      const ParamBlock& bb = layout_.find(BlockRole::Bias, l);
      jnxt_.resize(static_cast<std::size_t>(n_out));
      for (int i = 0; i < n_out; ++i) {
        auto w0 = static_cast<std::int32_t>(wb.offset) +
                  static_cast<std::int32_t>(i) * n_in;
        Jet s;
        Value d = t.dot(curb.start[0], w0, n_in);
        Value bias = pleaf(bb.offset + static_cast<std::size_t>(i));
        s.v = t.u2(Op::Add, d, bias, t.val(d) + t.val(bias), 1.0, 1.0);
        for (int a = 0; a < cm.n_axes; ++a) {
          auto ia = static_cast<std::size_t>(a);
          s.d1[ia] = t.dot(curb.start[static_cast<std::size_t>(cm.d1c[ia])], w0, n_in);
          if (cm.d2c[ia] >= 0)
            s.d2[ia] = t.dot(curb.start[static_cast<std::size_t>(cm.d2c[ia])], w0, n_in);
        }
        jnxt_[static_cast<std::size_t>(i)] = s;
      }
      if (l == L - 1) return jnxt_;

      if (ptanh) {
        const ParamBlock& ab = layout_.find(BlockRole::ParamTanhAB, -1);
        Value pa = pleaf(ab.offset), pb = pleaf(ab.offset + 1);
        for (int i = 0; i < n_out; ++i) {
          Jet& s = jnxt_[static_cast<std::size_t>(i)];
          s.v = pa * s.v + pb;
          for (int a = 0; a < cm.n_axes; ++a) {
            auto ia = static_cast<std::size_t>(a);
            s.d1[ia] = pa * s.d1[ia];
            if (cm.d2c[ia] >= 0) s.d2[ia] = pa * s.d2[ia];
          }
        }
      }

      // activation derivative table, then channel-major lifted blocks
      tab_.resize(static_cast<std::size_t>(n_out) * 4);
      for (int i = 0; i < n_out; ++i) {
        ad::Derivs3 d = ad::tanh_derivs(t.val(jnxt_[static_cast<std::size_t>(i)].v));
        double* row = tab_.data() + static_cast<std::size_t>(i) * 4;
        row[0] = d.u0;
        row[1] = d.u1;
        row[2] = d.u2;
        row[3] = d.u3;
      }
      Blocks nb;
      nb.len = n_out;
      nb.start[0] = static_cast<std::int32_t>(t.size());
      for (int i = 0; i < n_out; ++i) {
        const double* u = tab_.data() + static_cast<std::size_t>(i) * 4;
        t.u1(Op::Tanh, jnxt_[static_cast<std::size_t>(i)].v, u[0], u[1]);
      }
      for (int a = 0; a < cm.n_axes; ++a) {
        auto ia = static_cast<std::size_t>(a);
        nb.start[static_cast<std::size_t>(cm.d1c[ia])] =
            static_cast<std::int32_t>(t.size());
        for (int i = 0; i < n_out; ++i) {
          const Jet& s = jnxt_[static_cast<std::size_t>(i)];
          const double* u = tab_.data() + static_cast<std::size_t>(i) * 4;
          double f1 = t.val(s.d1[ia]);
          t.u2(Op::Tanh, s.v, s.d1[ia], u[1] * f1, u[2] * f1, u[1]);
        }
      }
      for (int a = 0; a < cm.n_axes; ++a) {
        auto ia = static_cast<std::size_t>(a);
        if (cm.d2c[ia] < 0) continue;
        nb.start[static_cast<std::size_t>(cm.d2c[ia])] =
            static_cast<std::int32_t>(t.size());
        for (int i = 0; i < n_out; ++i) {
          const Jet& s = jnxt_[static_cast<std::size_t>(i)];
          const double* u = tab_.data() + static_cast<std::size_t>(i) * 4;
          double f1 = t.val(s.d1[ia]);
          double f2 = t.val(s.d2[ia]);
          t.u3(Op::Tanh, s.v, s.d1[ia], s.d2[ia], u[2] * f1 * f1 + u[1] * f2,
               u[3] * f1 * f1 + u[2] * f2, 2.0 * u[2] * f1, u[1]);
        }
      }
      curb = nb;
      continue;
    }

    // ---- KAN layer ----
    const ParamBlock& cb = layout_.find(BlockRole::Coeff, l);
    const int m = be_->count();
    const int dot_len = n_in * m;
    const bool norm = basis::uses_tanh_normalization(spec_.family.family);
    const int tab_order = std::min(3, 1 + cm.max_order);

    jnorm_.resize(static_cast<std::size_t>(n_in));
    for (int j = 0; j < n_in; ++j) {
      jnorm_[static_cast<std::size_t>(j)] =
          norm ? ad::jtanh(t, plan, jcur_[static_cast<std::size_t>(j)])
               : jcur_[static_cast<std::size_t>(j)];
    }
    tab_.resize(static_cast<std::size_t>(n_in) * 4 * static_cast<std::size_t>(m));
    for (int j = 0; j < n_in; ++j) {
      double* rows = tab_.data() + static_cast<std::size_t>(j) * 4 *
                                       static_cast<std::size_t>(m);
      be_->tables(t.val(jnorm_[static_cast<std::size_t>(j)].v), tab_order, rows,
                  rows + m, rows + 2 * m, rows + 3 * m);
    }

    Jet S;  // silu blend accumulator, shared by every output unit
    if (blend) {
      for (int j = 0; j < n_in; ++j) {
        Jet sj = ad::jsilu(t, plan, jcur_[static_cast<std::size_t>(j)]);
        S = j == 0 ? sj : ad::jadd(t, plan, S, sj);
      }
    }

    Blocks basis_blocks;
    basis_blocks.len = dot_len;
    basis_blocks.start[0] = static_cast<std::int32_t>(t.size());
    for (int j = 0; j < n_in; ++j) {
      const Jet& nj = jnorm_[static_cast<std::size_t>(j)];
      const double* rows = tab_.data() + static_cast<std::size_t>(j) * 4 *
                                             static_cast<std::size_t>(m);
      for (int r = 0; r < m; ++r) t.u1(Op::Basis, nj.v, rows[r], rows[m + r]);
    }
    for (int a = 0; a < cm.n_axes; ++a) {
      auto ia = static_cast<std::size_t>(a);
      basis_blocks.start[static_cast<std::size_t>(cm.d1c[ia])] =
          static_cast<std::int32_t>(t.size());
      for (int j = 0; j < n_in; ++j) {
        const Jet& nj = jnorm_[static_cast<std::size_t>(j)];
        const double* rows = tab_.data() + static_cast<std::size_t>(j) * 4 *
                                               static_cast<std::size_t>(m);
        double f1 = t.val(nj.d1[ia]);
        for (int r = 0; r < m; ++r)
          t.u2(Op::Basis, nj.v, nj.d1[ia], rows[m + r] * f1,
               rows[2 * m + r] * f1, rows[m + r]);
      }
    }
    for (int a = 0; a < cm.n_axes; ++a) {
      auto ia = static_cast<std::size_t>(a);
      if (cm.d2c[ia] < 0) continue;
      basis_blocks.start[static_cast<std::size_t>(cm.d2c[ia])] =
          static_cast<std::int32_t>(t.size());
      for (int j = 0; j < n_in; ++j) {
        const Jet& nj = jnorm_[static_cast<std::size_t>(j)];
        const double* rows = tab_.data() + static_cast<std::size_t>(j) * 4 *
                                               static_cast<std::size_t>(m);
        double f1 = t.val(nj.d1[ia]);
        double f2 = t.val(nj.d2[ia]);
        for (int r = 0; r < m; ++r)
          t.u3(Op::Basis, nj.v, nj.d1[ia], nj.d2[ia],
               rows[2 * m + r] * f1 * f1 + rows[m + r] * f2,
               rows[3 * m + r] * f1 * f1 + rows[2 * m + r] * f2,
               2.0 * rows[2 * m + r] * f1, rows[m + r]);
      }
    }

    jnxt_.resize(static_cast<std::size_t>(n_out));
    const ParamBlock* fb =
        fourier ? &layout_.find(BlockRole::FourierBias, l) : nullptr;
    Value lam0, lam1;
    if (blend) {
      const ParamBlock& lb = layout_.find(BlockRole::SiluLambda, -1);
      lam0 = pleaf(lb.offset);
      lam1 = pleaf(lb.offset + 1);
    }
    for (int i = 0; i < n_out; ++i) {
      auto c0 = static_cast<std::int32_t>(cb.offset) +
                static_cast<std::int32_t>(i) * dot_len;
      Jet y;
      y.v = t.dot(basis_blocks.start[0], c0, dot_len);
      for (int a = 0; a < cm.n_axes; ++a) {
        auto ia = static_cast<std::size_t>(a);
        y.d1[ia] = t.dot(
            basis_blocks.start[static_cast<std::size_t>(cm.d1c[ia])], c0, dot_len);
        if (cm.d2c[ia] >= 0)
          y.d2[ia] = t.dot(
              basis_blocks.start[static_cast<std::size_t>(cm.d2c[ia])], c0, dot_len);
      }
      if (blend) {
        y.v = lam0 * S.v + lam1 * y.v;
        for (int a = 0; a < cm.n_axes; ++a) {
          auto ia = static_cast<std::size_t>(a);
          y.d1[ia] = lam0 * S.d1[ia] + lam1 * y.d1[ia];
          if (cm.d2c[ia] >= 0) y.d2[ia] = lam0 * S.d2[ia] + lam1 * y.d2[ia];
        }
      }
      if (fourier) {
        Value bias = pleaf(fb->offset + static_cast<std::size_t>(i));
        y.v = t.u2(Op::Add, y.v, bias, t.val(y.v) + t.val(bias), 1.0, 1.0);
      }
      jnxt_[static_cast<std::size_t>(i)] = y;
    }
    if (l == L - 1) return jnxt_;
    jcur_ = jnxt_;
  }
  throw NumericError("unreachable");
}

std::vector<Taylor2> Forward::directional_derivs2(Tape& t,
                                                  std::span<const double> x,
                                                  int axis) {
  std::vector<Jet> out = jet_pass(t, x, JetPlan::single(axis, 2));
  std::vector<Taylor2> r(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    r[i] = {out[i].v, out[i].d1[0], out[i].d2[0]};
  return r;
}

void Forward::value_pass(const ParamStore& params, std::span<const double> x,
                         std::span<double> out) {
  if (static_cast<int>(x.size()) != spec_.n_inputs())
    throw ConfigError("input size mismatch");
  if (params.size() != layout_.total)
    throw ConfigError("parameter vector size mismatch");
  if (static_cast<int>(out.size()) != spec_.n_outputs())
    throw ConfigError("output size mismatch");

  const bool mlp = basis::is_mlp(spec_.family.family);
  const bool ptanh = spec_.family.family == basis::Family::ParamTanh;
  const bool fourier = spec_.family.family == basis::Family::Fourier;
  const bool blend = spec_.family.silu_blend &&
                     spec_.family.family == basis::Family::BSpline;
  const int L = spec_.n_layers();
  const double* th = params.theta.data();

  vcur_.assign(x.begin(), x.end());
  for (int l = 0; l < L; ++l) {
    const int n_in = spec_.widths[static_cast<std::size_t>(l)];
    const int n_out = spec_.widths[static_cast<std::size_t>(l) + 1];
    vnxt_.resize(static_cast<std::size_t>(n_out));

    if (mlp) {
      const ParamBlock& wb = layout_.find(BlockRole::Weight, l);
      const ParamBlock& bb = layout_.find(BlockRole::Bias, l);
      for (int i = 0; i < n_out; ++i) {
        double s = ad::dot_accum(vcur_.data(),
                                 th + wb.offset + static_cast<std::size_t>(i) *
                                                      static_cast<std::size_t>(n_in),
                                 static_cast<std::size_t>(n_in)) +
                   th[bb.offset + static_cast<std::size_t>(i)];
        if (l == L - 1) {
          vnxt_[static_cast<std::size_t>(i)] = s;
        } else {
          if (ptanh) {
            const ParamBlock& ab = layout_.find(BlockRole::ParamTanhAB, -1);
            s = th[ab.offset] * s + th[ab.offset + 1];
          }
          vnxt_[static_cast<std::size_t>(i)] = std::tanh(s);
        }
      }
    } else {
      const ParamBlock& cb = layout_.find(BlockRole::Coeff, l);
      const int m = be_->count();
      const int dot_len = n_in * m;
      const bool norm = basis::uses_tanh_normalization(spec_.family.family);
      tab_.resize(static_cast<std::size_t>(dot_len));
      double S = 0.0;
      for (int j = 0; j < n_in; ++j) {
        double z = vcur_[static_cast<std::size_t>(j)];
        if (blend) S += ad::silu_derivs(z).u0;
        be_->values(norm ? std::tanh(z) : z,
                    tab_.data() + static_cast<std::size_t>(j) *
                                      static_cast<std::size_t>(m));
      }
      const ParamBlock* fb =
          fourier ? &layout_.find(BlockRole::FourierBias, l) : nullptr;
      const ParamBlock* lb =
          blend ? &layout_.find(BlockRole::SiluLambda, -1) : nullptr;
      for (int i = 0; i < n_out; ++i) {
        double y = ad::dot_accum(
            tab_.data(),
            th + cb.offset + static_cast<std::size_t>(i) *
                                 static_cast<std::size_t>(dot_len),
            static_cast<std::size_t>(dot_len));
        if (blend) y = th[lb->offset] * S + th[lb->offset + 1] * y;
        if (fourier) y = y + th[fb->offset + static_cast<std::size_t>(i)];
        vnxt_[static_cast<std::size_t>(i)] = y;
      }
    }
    vcur_.swap(vnxt_);
  }
  for (int i = 0; i < spec_.n_outputs(); ++i)
    out[static_cast<std::size_t>(i)] = vcur_[static_cast<std::size_t>(i)];
}

std::vector<double> forward(const NetworkSpec& spec, const ParamStore& params,
                            std::span<const double> x) {
  Forward f(spec);
  std::vector<double> out(static_cast<std::size_t>(spec.n_outputs()));
  f.value_pass(params, x, out);
  return out;
}

}  // namespace pinnkan::net
