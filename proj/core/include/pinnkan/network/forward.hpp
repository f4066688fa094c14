#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pinnkan/autodiff/jet.hpp"
#include "pinnkan/network/network.hpp"

namespace pinnkan::net {

// Single-axis second-order channels of one network output.
struct Taylor2 {
  ad::Value v0, v1, v2;
};

// Evaluation engine bound to one NetworkSpec. Owns all scratch, so repeated
// passes never allocate. Not thread-safe; use one per worker.
//
// Tape passes lay every activation (MLP) or edge-basis value (KAN) channel
// out as contiguous node blocks so each unit reduces to one structured dot
// node per channel against the contiguous parameter block.
class Forward {
 public:
  explicit Forward(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }

  // Tape pass. Parameters must already be seeded as the tape's leading
  // leaves (tape.reset(theta)). Returns one jet per network output carrying
  // the channels requested by the plan.
  std::vector<ad::Jet> jet_pass(ad::Tape& t, std::span<const double> x,
                                const ad::JetPlan& plan);

  // Value, first and second directional derivative of every output along one
  // input axis.
  std::vector<Taylor2> directional_derivs2(ad::Tape& t,
                                           std::span<const double> x,
                                           int axis);

  // Tape-free forward pass; bit-identical to the value channel of jet_pass
  // because both run the same kernels in the same order.
  void value_pass(const ParamStore& params, std::span<const double> x,
                  std::span<double> out);

 private:
  struct Blocks {
    std::array<std::int32_t, 6> start{};
    int len = 0;
  };

  NetworkSpec spec_;
  ParamLayout layout_;
  std::optional<basis::BasisEval> be_;

  // scratch
  std::vector<ad::Jet> jcur_, jnxt_, jnorm_;
  std::vector<double> tab_;   // basis/activation derivative tables
  std::vector<double> vcur_, vnxt_;  // plain pass activations
};

// Convenience one-shot wrappers.
std::vector<double> forward(const NetworkSpec& spec, const ParamStore& params,
                            std::span<const double> x);

}  // namespace pinnkan::net
