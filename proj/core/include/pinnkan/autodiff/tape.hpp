#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pinnkan/common.hpp"

namespace pinnkan::ad {

class Tape;

// Handle to a scalar on the tape.
struct Value {
  std::int32_t id = -1;
  Tape* tape = nullptr;

  bool valid() const { return id >= 0; }
};

// Primitive label carried by every node, used in diagnostics when a sweep
// hits a non-finite number.
enum class Op : std::uint8_t {
  Param, Input, Const,
  Add, Sub, Mul, Div, Neg, Scale, Shift,
  Pow, Exp, Sin, Cos, Tanh, Silu,
  Basis,   // lifted activation-basis kernel (B-spline, RBF, polynomial, ...)
  Dot,
};

const char* op_name(Op op);

// Propagation rule of a node. Partials of U1/U2/U3 nodes are stored at record
// time; Dot nodes reference two contiguous value ranges and their partials
// are the opposing range's values, read during the sweep instead of stored.
enum class Kind : std::uint8_t { Leaf, U1, U2, U3, Dot };

struct Node {
  std::int32_t a = -1, b = -1, c = -1;
  Kind kind = Kind::Leaf;
  Op op = Op::Const;
  double wa = 0, wb = 0, wc = 0;
};

// Fixed-order dot product: eight independent accumulator lanes plus a tail,
// reduced in a pinned tree. Both the tape and the tape-free forward pass use
// this kernel, which is what makes them bit-identical.
inline double dot_accum(const double* x, const double* y, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t j = 0; j < 8; ++j) acc[j] += x[i + j] * y[i + j];
  double tail = 0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return (((acc[0] + acc[1]) + (acc[2] + acc[3])) +
          ((acc[4] + acc[5]) + (acc[6] + acc[7]))) + tail;
}

// Flat reverse-mode tape. Parameters are seeded as the first n_params leaves
// so a gradient is just the adjoints of the leading block after one sweep.
// reset() keeps capacity, so a trainer reuses one tape across iterations.
class Tape {
 public:
  void reset(std::span<const double> params);
  void reset() { reset({}); }

  int n_params() const { return n_params_; }
  std::size_t size() const { return nodes_.size(); }

  Value param(int i);
  Value input(double v) { return emit_leaf(Op::Input, v); }
  Value constant(double v) { return emit_leaf(Op::Const, v); }

  Value u1(Op op, Value a, double v, double wa);
  Value u2(Op op, Value a, Value b, double v, double wa, double wb);
  Value u3(Op op, Value a, Value b, Value c, double v,
           double wa, double wb, double wc);

  // Value of sum_k val[x0+k] * val[y0+k] over two node-id ranges.
  Value dot(std::int32_t x0, std::int32_t y0, std::int32_t len);

  double val(Value v) const { return val_[static_cast<std::size_t>(v.id)]; }
  double adj(Value v) const { return adj_[static_cast<std::size_t>(v.id)]; }
  const double* val_data() const { return val_.data(); }

  // Adjoint sweep seeded at `seed` with dSeed/dSeed = 1.
  void backward(Value seed);

  // backward() + adjoints of the parameter block.
  std::vector<double> gradient(Value loss);

 private:
  Value emit_leaf(Op op, double v);
  Value push(const Node& n, double v);

  std::vector<Node> nodes_;
  std::vector<double> val_;
  std::vector<double> adj_;
  int n_params_ = 0;
};

// ---- user-facing scalar expression API ----------------------------------

Value operator+(Value a, Value b);
Value operator-(Value a, Value b);
Value operator*(Value a, Value b);
Value operator/(Value a, Value b);
Value operator-(Value a);
Value operator+(Value a, double c);
Value operator+(double c, Value a);
Value operator-(Value a, double c);
Value operator-(double c, Value a);
Value operator*(Value a, double c);
Value operator*(double c, Value a);
Value operator/(Value a, double c);

// a^p for a > 0, or integer p with any base.
Value pow(Value a, double p);
Value exp(Value a);
Value sin(Value a);
Value cos(Value a);
Value tanh(Value a);

}  // namespace pinnkan::ad
