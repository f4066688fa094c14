#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pinnkan::ad {

// Gradient of some scalar loss at the given parameter vector.
using GradFn = std::function<std::vector<double>(std::span<const double>)>;

// Hessian-vector product by central differences of the gradient:
//   H v ~= (grad(theta + eps vhat) - grad(theta - eps vhat)) * |v| / (2 eps)
// with vhat = v/|v| and eps = 1e-4 * (1 + max_i |theta_i|).
// Throws NumericError("zero probe vector") when |v| = 0.
std::vector<double> hvp(const GradFn& grad_at, std::span<const double> theta,
                        std::span<const double> v);

}  // namespace pinnkan::ad
