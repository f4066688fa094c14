#include "pinnkan/report/metrics.hpp"

#include <cmath>
#include <vector>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/common.hpp"

namespace pinnkan::report {

double relative_l2(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size())
    throw ConfigError("prediction and reference lengths differ");
  if (ref.empty()) throw ConfigError("empty evaluation vectors");
  std::vector<double> diff(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) diff[i] = ref[i] - pred[i];
  double num = std::sqrt(ad::dot_accum(diff.data(), diff.data(), diff.size()));
  double den = std::sqrt(ad::dot_accum(ref.data(), ref.data(), ref.size()));
  if (den == 0.0)
    throw NumericError("zero reference norm, relative error undefined");
  return 100.0 * num / den;
}

}  // namespace pinnkan::report
