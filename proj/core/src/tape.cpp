#include "pinnkan/autodiff/tape.hpp"

#include <string>

namespace pinnkan::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::Param: return "param";
    case Op::Input: return "input";
    case Op::Const: return "const";
    case Op::Add:   return "add";
    case Op::Sub:   return "sub";
    case Op::Mul:   return "mul";
    case Op::Div:   return "div";
    case Op::Neg:   return "neg";
    case Op::Scale: return "scale";
    case Op::Shift: return "shift";
    case Op::Pow:   return "pow";
    case Op::Exp:   return "exp";
    case Op::Sin:   return "sin";
    case Op::Cos:   return "cos";
    case Op::Tanh:  return "tanh";
    case Op::Silu:  return "silu";
    case Op::Basis: return "basis";
    case Op::Dot:   return "dot";
  }
  return "?";
}

void Tape::reset(std::span<const double> params) {
  nodes_.clear();
  val_.clear();
  adj_.clear();
  n_params_ = static_cast<int>(params.size());
  nodes_.resize(params.size());
  val_.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    nodes_[i].kind = Kind::Leaf;
    nodes_[i].op = Op::Param;
    val_[i] = params[i];
  }
}

Value Tape::param(int i) {
  return Value{i, this};
}

Value Tape::push(const Node& n, double v) {
  if (!std::isfinite(v))
    throw NumericError(std::string("non-finite value produced by primitive '") +
                       op_name(n.op) + "'");
  nodes_.push_back(n);
  val_.push_back(v);
  return Value{static_cast<std::int32_t>(nodes_.size() - 1), this};
}

Value Tape::emit_leaf(Op op, double v) {
  Node n;
  n.kind = Kind::Leaf;
  n.op = op;
  return push(n, v);
}

Value Tape::u1(Op op, Value a, double v, double wa) {
  Node n;
  n.kind = Kind::U1;
  n.op = op;
  n.a = a.id;
  n.wa = wa;
  return push(n, v);
}

Value Tape::u2(Op op, Value a, Value b, double v, double wa, double wb) {
  Node n;
  n.kind = Kind::U2;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.wa = wa;
  n.wb = wb;
  return push(n, v);
}

Value Tape::u3(Op op, Value a, Value b, Value c, double v,
               double wa, double wb, double wc) {
  Node n;
  n.kind = Kind::U3;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.c = c.id;
  n.wa = wa;
  n.wb = wb;
  n.wc = wc;
  return push(n, v);
}

Value Tape::dot(std::int32_t x0, std::int32_t y0, std::int32_t len) {
  Node n;
  n.kind = Kind::Dot;
  n.op = Op::Dot;
  n.a = x0;
  n.b = y0;
  n.c = len;
  double v = dot_accum(val_.data() + x0, val_.data() + y0,
                       static_cast<std::size_t>(len));
  return push(n, v);
}

void Tape::backward(Value seed) {
  adj_.assign(val_.size(), 0.0);
  adj_[static_cast<std::size_t>(seed.id)] = 1.0;
  double* adj = adj_.data();
  const double* val = val_.data();
  for (std::int32_t i = seed.id; i >= 0; --i) {
    double a = adj[i];
    if (a == 0.0) continue;
    if (!std::isfinite(a))
      throw NumericError(
          std::string("non-finite adjoint during reverse sweep at primitive '") +
          op_name(nodes_[static_cast<std::size_t>(i)].op) + "'");
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.kind) {
      case Kind::Leaf:
        break;
      case Kind::U1:
        adj[n.a] += n.wa * a;
        break;
      case Kind::U2:
        adj[n.a] += n.wa * a;
        adj[n.b] += n.wb * a;
        break;
      case Kind::U3:
        adj[n.a] += n.wa * a;
        adj[n.b] += n.wb * a;
        adj[n.c] += n.wc * a;
        break;
      case Kind::Dot: {
        double* ax = adj + n.a;
        double* ay = adj + n.b;
        const double* vx = val + n.a;
        const double* vy = val + n.b;
        for (std::int32_t k = 0; k < n.c; ++k) {
          ax[k] += vy[k] * a;
          ay[k] += vx[k] * a;
        }
        break;
      }
    }
  }
}

std::vector<double> Tape::gradient(Value loss) {
  backward(loss);
  return std::vector<double>(adj_.begin(), adj_.begin() + n_params_);
}

// ---- expression API -------------------------------------------------------

Value operator+(Value a, Value b) {
  return a.tape->u2(Op::Add, a, b, a.tape->val(a) + b.tape->val(b), 1.0, 1.0);
}

Value operator-(Value a, Value b) {
  return a.tape->u2(Op::Sub, a, b, a.tape->val(a) - b.tape->val(b), 1.0, -1.0);
}

Value operator*(Value a, Value b) {
  double va = a.tape->val(a), vb = b.tape->val(b);
  return a.tape->u2(Op::Mul, a, b, va * vb, vb, va);
}

Value operator/(Value a, Value b) {
  double va = a.tape->val(a), vb = b.tape->val(b);
  return a.tape->u2(Op::Div, a, b, va / vb, 1.0 / vb, -va / (vb * vb));
}

Value operator-(Value a) { return a.tape->u1(Op::Neg, a, -a.tape->val(a), -1.0); }

Value operator+(Value a, double c) {
  return a.tape->u1(Op::Shift, a, a.tape->val(a) + c, 1.0);
}
Value operator+(double c, Value a) { return a + c; }

Value operator-(Value a, double c) { return a + (-c); }

Value operator-(double c, Value a) {
  return a.tape->u1(Op::Scale, a, c - a.tape->val(a), -1.0);
}

Value operator*(Value a, double c) {
  return a.tape->u1(Op::Scale, a, a.tape->val(a) * c, c);
}
Value operator*(double c, Value a) { return a * c; }

Value operator/(Value a, double c) { return a * (1.0 / c); }

Value pow(Value a, double p) {
  double va = a.tape->val(a);
  return a.tape->u1(Op::Pow, a, std::pow(va, p), p * std::pow(va, p - 1.0));
}

Value exp(Value a) {
  double e = std::exp(a.tape->val(a));
  return a.tape->u1(Op::Exp, a, e, e);
}

Value sin(Value a) {
  double va = a.tape->val(a);
  return a.tape->u1(Op::Sin, a, std::sin(va), std::cos(va));
}

Value cos(Value a) {
  double va = a.tape->val(a);
  return a.tape->u1(Op::Cos, a, std::cos(va), -std::sin(va));
}

Value tanh(Value a) {
  double t = std::tanh(a.tape->val(a));
  return a.tape->u1(Op::Tanh, a, t, 1.0 - t * t);
}

}  // namespace pinnkan::ad
