#pragma once

#include <span>

namespace pinnkan::report {

// 100 * ||ref - pred||_2 / ||ref||_2. Throws ConfigError on length mismatch
// and NumericError when the reference norm is zero (the metric is undefined).
double relative_l2(std::span<const double> pred, std::span<const double> ref);

}  // namespace pinnkan::report
