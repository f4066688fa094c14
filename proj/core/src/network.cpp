#include "pinnkan/network/network.hpp"

#include <cmath>

#include "pinnkan/common.hpp"
#include "pinnkan/rng.hpp"

namespace pinnkan::net {

std::size_t param_count(const NetworkSpec& spec) {
  const auto& w = spec.widths;
  if (w.size() < 2) throw ConfigError("network needs at least two widths");
  std::size_t edges = 0, units_out = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    edges += static_cast<std::size_t>(w[l]) * static_cast<std::size_t>(w[l + 1]);
    units_out += static_cast<std::size_t>(w[l + 1]);
  }
  if (basis::is_mlp(spec.family.family)) {
    std::size_t n = edges + units_out;
    if (spec.family.family == basis::Family::ParamTanh) n += 2;
    return n;
  }
  std::size_t m = static_cast<std::size_t>(basis_count(spec.family));
  std::size_t n = edges * m;
  if (spec.family.family == basis::Family::Fourier) n += units_out;
  if (spec.family.silu_blend && spec.family.family == basis::Family::BSpline)
    n += 2;
  return n;
}

ParamLayout ParamLayout::build(const NetworkSpec& spec) {
  ParamLayout lay;
  const auto& w = spec.widths;
  if (w.size() < 2) throw ConfigError("network needs at least two widths");
  std::size_t ofs = 0;
  auto add = [&](BlockRole role, int layer, std::size_t count) {
    lay.blocks.push_back({role, layer, ofs, count});
    ofs += count;
  };
  if (basis::is_mlp(spec.family.family)) {
    for (int l = 0; l + 1 < static_cast<int>(w.size()); ++l) {
      auto in = static_cast<std::size_t>(w[static_cast<std::size_t>(l)]);
      auto out = static_cast<std::size_t>(w[static_cast<std::size_t>(l) + 1]);
      add(BlockRole::Weight, l, in * out);
      add(BlockRole::Bias, l, out);
    }
    if (spec.family.family == basis::Family::ParamTanh)
      add(BlockRole::ParamTanhAB, -1, 2);
  } else {
    auto m = static_cast<std::size_t>(basis_count(spec.family));
    for (int l = 0; l + 1 < static_cast<int>(w.size()); ++l) {
      auto in = static_cast<std::size_t>(w[static_cast<std::size_t>(l)]);
      auto out = static_cast<std::size_t>(w[static_cast<std::size_t>(l) + 1]);
      add(BlockRole::Coeff, l, in * out * m);
      if (spec.family.family == basis::Family::Fourier)
        add(BlockRole::FourierBias, l, out);
    }
    if (spec.family.silu_blend && spec.family.family == basis::Family::BSpline)
      add(BlockRole::SiluLambda, -1, 2);
  }
  lay.total = ofs;
  return lay;
}

const ParamBlock& ParamLayout::find(BlockRole role, int layer) const {
  for (const auto& b : blocks)
    if (b.role == role && b.layer == layer) return b;
  throw NumericError("parameter block not present in layout");
}

ParamStore xavier_init(const NetworkSpec& spec, std::uint64_t seed) {
  ParamLayout lay = ParamLayout::build(spec);
  ParamStore ps;
  ps.theta.assign(lay.total, 0.0);
  Rng rng(seed);
  auto m = static_cast<double>(basis_count(spec.family));
  for (const auto& b : lay.blocks) {
    switch (b.role) {
      case BlockRole::Weight: {
        double fan_in = spec.widths[static_cast<std::size_t>(b.layer)];
        double fan_out = spec.widths[static_cast<std::size_t>(b.layer) + 1];
        double lim = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t i = 0; i < b.count; ++i)
          ps.theta[b.offset + i] = rng.uniform(-lim, lim);
        break;
      }
      case BlockRole::Coeff: {
        double fan_in = spec.widths[static_cast<std::size_t>(b.layer)];
        double fan_out = spec.widths[static_cast<std::size_t>(b.layer) + 1];
        double lim = std::sqrt(6.0 / (fan_in * m + fan_out * m));
        for (std::size_t i = 0; i < b.count; ++i)
          ps.theta[b.offset + i] = rng.uniform(-lim, lim);
        break;
      }
      case BlockRole::Bias:
      case BlockRole::FourierBias:
        break;  // zero
      case BlockRole::ParamTanhAB:
        ps.theta[b.offset] = 1.0;
        ps.theta[b.offset + 1] = 0.0;
        break;
      case BlockRole::SiluLambda:
        ps.theta[b.offset] = 1.0;
        ps.theta[b.offset + 1] = 1.0;
        break;
    }
  }
  return ps;
}

}  // namespace pinnkan::net
