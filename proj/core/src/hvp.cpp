#include "pinnkan/autodiff/hvp.hpp"

#include <cmath>

#include "pinnkan/common.hpp"

namespace pinnkan::ad {

std::vector<double> hvp(const GradFn& grad_at, std::span<const double> theta,
                        std::span<const double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  double norm = std::sqrt(norm2);
  if (norm == 0.0) throw NumericError("zero probe vector");

  double amax = 0.0;
  for (double x : theta) amax = std::max(amax, std::abs(x));
  double eps = 1e-4 * (1.0 + amax);

  std::vector<double> plus(theta.begin(), theta.end());
  std::vector<double> minus(theta.begin(), theta.end());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double step = eps * v[i] / norm;
    plus[i] += step;
    minus[i] -= step;
  }

  std::vector<double> gp = grad_at(plus);
  std::vector<double> gm = grad_at(minus);
  std::vector<double> out(theta.size());
  double scale = norm / (2.0 * eps);
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = (gp[i] - gm[i]) * scale;
  return out;
}

}  // namespace pinnkan::ad
