#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinnkan/basis/basis.hpp"

namespace pinnkan::net {

// Fully-connected scalar network: MLP families apply an activation to affine
// combinations; KAN families expand every edge in a learnable basis, with no
// trailing affine map on the output layer.
struct NetworkSpec {
  std::vector<int> widths;  // input width, hidden widths..., output width
  basis::FamilySpec family;
  std::string arch_tag = "custom";  // informational: A1, A2, custom

  int n_layers() const { return static_cast<int>(widths.size()) - 1; }
  int n_inputs() const { return widths.front(); }
  int n_outputs() const { return widths.back(); }
};

// Total trainable parameters:
//   MLP:        sum_l (in_l*out_l + out_l)        (+2 for param_tanh)
//   KAN:        m * sum_l in_l*out_l              (m = basis_count)
//   Fourier:    adds one bias per output unit of every layer
//   silu blend: adds the global (lambda0, lambda1) pair
std::size_t param_count(const NetworkSpec& spec);

enum class BlockRole : std::uint8_t {
  Weight,       // MLP W_l, row-major [out][in]
  Bias,         // MLP b_l
  Coeff,        // KAN coefficients, [out][in][m]
  FourierBias,  // per-output-unit bias of a Fourier layer
  ParamTanhAB,  // global (a, b)
  SiluLambda,   // global (lambda0, lambda1)
};

struct ParamBlock {
  BlockRole role;
  int layer;  // -1 for global blocks
  std::size_t offset;
  std::size_t count;
};

// Deterministic bijection between the flat parameter vector and the
// structured blocks, in layer order.
struct ParamLayout {
  std::vector<ParamBlock> blocks;
  std::size_t total = 0;

  static ParamLayout build(const NetworkSpec& spec);

  // First block matching (role, layer); throws NumericError if absent.
  const ParamBlock& find(BlockRole role, int layer) const;
};

struct ParamStore {
  std::vector<double> theta;

  std::size_t size() const { return theta.size(); }
};

// Xavier-uniform initialization, drawn in layout order from the given seed:
//   MLP weights  ~ U(+-sqrt(6/(fan_in+fan_out))), biases 0, (a,b) = (1,0)
//   KAN coeffs   ~ U(+-sqrt(6/(in*m + out*m))), Fourier biases 0,
//   (lambda0, lambda1) = (1, 1)
ParamStore xavier_init(const NetworkSpec& spec, std::uint64_t seed);

}  // namespace pinnkan::net
