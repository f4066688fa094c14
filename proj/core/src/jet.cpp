#include "pinnkan/autodiff/jet.hpp"

namespace pinnkan::ad {

std::vector<Jet> make_input_jets(Tape& t, const JetPlan& plan,
                                 std::span<const double> x) {
  std::vector<Jet> jets(x.size());
  Value zero = t.constant(0.0);
  Value one = t.constant(1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Jet& j = jets[i];
    j.v = t.input(x[i]);
    for (int a = 0; a < plan.n_axes; ++a) {
      const AxisReq& ax = plan.axes[static_cast<std::size_t>(a)];
      j.d1[static_cast<std::size_t>(a)] =
          ax.input == static_cast<int>(i) ? one : zero;
      if (ax.order >= 2) j.d2[static_cast<std::size_t>(a)] = zero;
    }
  }
  return jets;
}

Jet jconst(Tape& t, const JetPlan& plan, double c) {
  Jet j;
  j.v = t.constant(c);
  Value zero = t.constant(0.0);
  for (int a = 0; a < plan.n_axes; ++a) {
    j.d1[static_cast<std::size_t>(a)] = zero;
    if (plan.axes[static_cast<std::size_t>(a)].order >= 2)
      j.d2[static_cast<std::size_t>(a)] = zero;
  }
  return j;
}

Jet jadd(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g) {
  Jet r;
  r.v = f.v + g.v;
  for (int a = 0; a < plan.n_axes; ++a) {
    auto ia = static_cast<std::size_t>(a);
    r.d1[ia] = f.d1[ia] + g.d1[ia];
    if (plan.axes[ia].order >= 2) r.d2[ia] = f.d2[ia] + g.d2[ia];
  }
  (void)t;
  return r;
}

Jet jsub(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g) {
  Jet r;
  r.v = f.v - g.v;
  for (int a = 0; a < plan.n_axes; ++a) {
    auto ia = static_cast<std::size_t>(a);
    r.d1[ia] = f.d1[ia] - g.d1[ia];
    if (plan.axes[ia].order >= 2) r.d2[ia] = f.d2[ia] - g.d2[ia];
  }
  (void)t;
  return r;
}

Jet jmul(Tape& t, const JetPlan& plan, const Jet& f, const Jet& g) {
  Jet r;
  r.v = f.v * g.v;
  for (int a = 0; a < plan.n_axes; ++a) {
    auto ia = static_cast<std::size_t>(a);
    r.d1[ia] = f.d1[ia] * g.v + f.v * g.d1[ia];
    if (plan.axes[ia].order >= 2)
      r.d2[ia] = f.d2[ia] * g.v + 2.0 * (f.d1[ia] * g.d1[ia]) + f.v * g.d2[ia];
  }
  (void)t;
  return r;
}

Jet jscale(Tape& t, const JetPlan& plan, const Jet& f, double c) {
  Jet r;
  r.v = f.v * c;
  for (int a = 0; a < plan.n_axes; ++a) {
    auto ia = static_cast<std::size_t>(a);
    r.d1[ia] = f.d1[ia] * c;
    if (plan.axes[ia].order >= 2) r.d2[ia] = f.d2[ia] * c;
  }
  (void)t;
  return r;
}

Jet jshift(Tape& t, const JetPlan& plan, const Jet& f, double c) {
  Jet r = f;
  r.v = f.v + c;
  (void)t;
  (void)plan;
  return r;
}

Jet jpowi(Tape& t, const JetPlan& plan, const Jet& f, int n) {
  Jet r = f;
  for (int k = 1; k < n; ++k) r = jmul(t, plan, r, f);
  return r;
}

Jet lift(Tape& t, const JetPlan& plan, const Jet& f, Op op,
         double u0, double u1, double u2, double u3) {
  Jet r;
  r.v = t.u1(op, f.v, u0, u1);
  for (int a = 0; a < plan.n_axes; ++a) {
    auto ia = static_cast<std::size_t>(a);
    double f1 = t.val(f.d1[ia]);
    r.d1[ia] = t.u2(op, f.v, f.d1[ia], u1 * f1, u2 * f1, u1);
    if (plan.axes[ia].order >= 2) {
      double f2 = t.val(f.d2[ia]);
      r.d2[ia] = t.u3(op, f.v, f.d1[ia], f.d2[ia], u2 * f1 * f1 + u1 * f2,
                      u3 * f1 * f1 + u2 * f2, 2.0 * u2 * f1, u1);
    }
  }
  return r;
}

Jet jsin(Tape& t, const JetPlan& plan, const Jet& f) {
  double z = t.val(f.v);
  double s = std::sin(z), c = std::cos(z);
  return lift(t, plan, f, Op::Sin, s, c, -s, -c);
}

Jet jcos(Tape& t, const JetPlan& plan, const Jet& f) {
  double z = t.val(f.v);
  double s = std::sin(z), c = std::cos(z);
  return lift(t, plan, f, Op::Cos, c, -s, -c, s);
}

Jet jexp(Tape& t, const JetPlan& plan, const Jet& f) {
  double e = std::exp(t.val(f.v));
  return lift(t, plan, f, Op::Exp, e, e, e, e);
}

Derivs3 tanh_derivs(double z) {
  double u0 = std::tanh(z);
  double s = 1.0 - u0 * u0;                    // sech^2
  double u2 = -2.0 * u0 * s;
  double u3 = -2.0 * s * (1.0 - 3.0 * u0 * u0);
  return {u0, s, u2, u3};
}

Derivs3 silu_derivs(double z) {
  double sg = 1.0 / (1.0 + std::exp(-z));
  double sg1 = sg * (1.0 - sg);
  double sg2 = sg1 * (1.0 - 2.0 * sg);
  double sg3 = sg2 * (1.0 - 2.0 * sg) - 2.0 * sg1 * sg1;
  double u0 = z * sg;
  double u1 = sg + z * sg1;
  double u2 = 2.0 * sg1 + z * sg2;
  double u3 = 3.0 * sg2 + z * sg3;
  return {u0, u1, u2, u3};
}

Jet jtanh(Tape& t, const JetPlan& plan, const Jet& f) {
  Derivs3 d = tanh_derivs(t.val(f.v));
  return lift(t, plan, f, Op::Tanh, d.u0, d.u1, d.u2, d.u3);
}

Jet jsilu(Tape& t, const JetPlan& plan, const Jet& f) {
  Derivs3 d = silu_derivs(t.val(f.v));
  return lift(t, plan, f, Op::Silu, d.u0, d.u1, d.u2, d.u3);
}

}  // namespace pinnkan::ad
