#include "pinnkan/diag/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

#include "pinnkan/common.hpp"

namespace pinnkan::diag {

namespace {

double off_diag_norm(const std::vector<double>& a, int n) {
  double s = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (p != q) {
        double v = a[static_cast<std::size_t>(p * n + q)];
        s += v * v;
      }
  return std::sqrt(s);
}

}  // namespace

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ConfigError("matrix size does not match its declared order");
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i * n + j)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (at(i, j) + at(j, i));
      at(i, j) = at(j, i) = m;
    }

  double fro = 0;
  for (double v : a) fro += v * v;
  fro = std::sqrt(fro);
  const double stop = 1e-12 * fro;

  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diag_norm(a, n) <= stop) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (apq == 0.0) continue;
        double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = std::copysign(1.0, tau) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        double app = at(p, p), aqq = at(q, q);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = at(p, k) = c * akp - s * akq;
          at(k, q) = at(q, k) = s * akp + c * akq;
        }
      }
  }
  if (sweep == max_sweeps && off_diag_norm(a, n) > stop)
    throw NumericError("jacobi eigensolver stalled, off-diagonal residual " +
                       fmt17(off_diag_norm(a, n)));

  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace pinnkan::diag
