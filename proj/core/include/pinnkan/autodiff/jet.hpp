#pragma once

#include <array>
#include <span>
#include <vector>

#include "pinnkan/autodiff/tape.hpp"

namespace pinnkan::ad {

// Which directional derivatives a forward pass should carry: one entry per
// requested input axis, each tracked to first or second order. No mixed
// partials; the PDE residuals here only need u_a and u_aa per axis.
struct AxisReq {
  int input = 0;  // index into the input coordinates
  int order = 2;  // 1 or 2
};

struct JetPlan {
  int n_axes = 0;
  std::array<AxisReq, 3> axes{};

  static JetPlan none() { return {}; }

  static JetPlan single(int input, int order = 2) {
    JetPlan p;
    p.n_axes = 1;
    p.axes[0] = {input, order};
    return p;
  }

  JetPlan& add(int input, int order) {
    axes[static_cast<std::size_t>(n_axes++)] = {input, order};
    return *this;
  }
};

// A scalar with its directional derivative channels. Every channel is a tape
// node; composing jets and then differentiating a loss built from them gives
// parameter gradients that see the derivative channels too.
struct Jet {
  Value v;
  std::array<Value, 3> d1{};
  std::array<Value, 3> d2{};
};

// Jets for the input coordinates: d(x_i)/d(axis a) is 1 when axis a is
// coordinate i, else 0; second derivatives of coordinates vanish.
std::vector<Jet> make_input_jets(Tape& t, const JetPlan& plan,
                                 std::span<const double> x);

Jet jconst(Tape& t, const JetPlan& plan, double c);

Jet jadd(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g);
Jet jsub(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g);
Jet jmul(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g);
Jet jscale(Tape& t, const JetPlan& plan, const Jet& f, double c);
Jet jshift(Tape& t, const JetPlan& plan, const Jet& f, double c);
// f^n for small integer n >= 1, by repeated multiplication.
Jet jpowi(Tape& t, const JetPlan& plan, const Jet& f, int n);

// Core rule: apply a smooth scalar map u to a jet given u and its first three
// derivatives at the jet's value. Emits one node per active channel:
//   v   = u0
//   d1  = u1 f1           (partials: u2 f1 wrt f.v, u1 wrt f.d1)
//   d2  = u2 f1^2 + u1 f2 (partials: u3 f1^2 + u2 f2, 2 u2 f1, u1)
Jet lift(Tape& t, const JetPlan& plan, const Jet& f, Op op,
         double u0, double u1, double u2, double u3);

Jet jsin(Tape& t, const JetPlan& plan, const Jet& f);
Jet jcos(Tape& t, const JetPlan& plan, const Jet& f);
Jet jexp(Tape& t, const JetPlan& plan, const Jet& f);
Jet jtanh(Tape& t, const JetPlan& plan, const Jet& f);
Jet jsilu(Tape& t, const JetPlan& plan, const Jet& f);

// tanh and silu with derivatives up to third order, shared with the
// activation-basis tables.
struct Derivs3 {
  double u0, u1, u2, u3;
};
Derivs3 tanh_derivs(double z);
Derivs3 silu_derivs(double z);

}  // namespace pinnkan::ad
