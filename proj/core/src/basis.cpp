#include "pinnkan/basis/basis.hpp"

#include <cmath>
#include <cstring>

#include "pinnkan/autodiff/jet.hpp"
#include "pinnkan/common.hpp"

namespace pinnkan::basis {

const char* family_name(Family f) {
  switch (f) {
    case Family::Tanh:      return "tanh";
    case Family::ParamTanh: return "param_tanh";
    case Family::BSpline:   return "bspline";
    case Family::Grbf:      return "grbf";
    case Family::Fourier:   return "fourier";
    case Family::Chebyshev: return "chebyshev";
    case Family::Jacobi:    return "jacobi";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::Tanh, Family::ParamTanh, Family::BSpline,
                   Family::Grbf, Family::Fourier, Family::Chebyshev,
                   Family::Jacobi}) {
    if (name == family_name(f)) return f;
  }
  throw ConfigError("unknown family '" + name +
                    "' (valid: tanh, param_tanh, bspline, grbf, fourier, "
                    "chebyshev, jacobi)");
}

int basis_count(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::Tanh:
    case Family::ParamTanh: return 0;
    case Family::BSpline:   return spec.spline_grid + spec.spline_degree - 1;
    case Family::Grbf:      return spec.n_centers;
    case Family::Fourier:   return 2 * spec.fourier_k;
    case Family::Chebyshev:
    case Family::Jacobi:    return spec.poly_degree + 1;
  }
  return 0;
}

double normalize_input(const FamilySpec& spec, double z) {
  return uses_tanh_normalization(spec.family) ? std::tanh(z) : z;
}

namespace {

// Polynomial recurrences build coefficient rows (ascending powers); each
// basis then stores its value row plus three differentiated rows so tables()
// is four short Horner loops per basis.

using Coeffs = std::vector<double>;

Coeffs differentiate(const Coeffs& c) {
  Coeffs d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < c.size(); ++k)
    d[k - 1] = c[k] * static_cast<double>(k);
  return d;
}

double horner(const double* c, int n, double z) {
  double v = 0.0;
  for (int k = n - 1; k >= 0; --k) v = v * z + c[k];
  return v;
}

std::vector<Coeffs> chebyshev_polys(int degree) {
  std::vector<Coeffs> p(static_cast<std::size_t>(degree) + 1);
  p[0] = {1.0};
  if (degree >= 1) p[1] = {0.0, 1.0};
  for (int n = 2; n <= degree; ++n) {
    Coeffs c(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t k = 0; k < p[static_cast<std::size_t>(n - 1)].size(); ++k)
      c[k + 1] += 2.0 * p[static_cast<std::size_t>(n - 1)][k];
    for (std::size_t k = 0; k < p[static_cast<std::size_t>(n - 2)].size(); ++k)
      c[k] -= p[static_cast<std::size_t>(n - 2)][k];
    p[static_cast<std::size_t>(n)] = std::move(c);
  }
  return p;
}

// Classical Jacobi three-term recurrence for general (alpha, beta).
std::vector<Coeffs> jacobi_polys(int degree, double al, double be) {
  std::vector<Coeffs> p(static_cast<std::size_t>(degree) + 1);
  p[0] = {1.0};
  if (degree >= 1) p[1] = {(al - be) / 2.0, (al + be + 2.0) / 2.0};
  for (int n = 2; n <= degree; ++n) {
    double s = 2.0 * n + al + be;
    double denom = 2.0 * n * (n + al + be) * (s - 2.0);
    double az = (s - 1.0) * s * (s - 2.0) / denom;
    double b0 = (s - 1.0) * (al * al - be * be) / denom;
    double cm = -2.0 * (n + al - 1.0) * (n + be - 1.0) * s / denom;
    Coeffs c(static_cast<std::size_t>(n) + 1, 0.0);
    const Coeffs& p1 = p[static_cast<std::size_t>(n - 1)];
    const Coeffs& p2 = p[static_cast<std::size_t>(n - 2)];
    for (std::size_t k = 0; k < p1.size(); ++k) {
      c[k + 1] += az * p1[k];
      c[k] += b0 * p1[k];
    }
    for (std::size_t k = 0; k < p2.size(); ++k) c[k] += cm * p2[k];
    p[static_cast<std::size_t>(n)] = std::move(c);
  }
  return p;
}

// The published degree-4 basis with alpha = beta = 1. P2 and P3 carry twice
// the classical scaling and P4 is proportional to (1-z^2) * P2, so it is not
// the classical Jacobi polynomial at all; it is reproduced verbatim.
std::vector<Coeffs> jacobi_printed_polys() {
  return {
      {1.0},
      {0.0, 2.0},
      {-1.5, 0.0, 7.5},
      {0.0, -7.5, 0.0, 17.5},
      {4.375, 0.0, -43.75, 0.0, 39.375},
  };
}

}  // namespace

BasisEval::BasisEval(const FamilySpec& spec) : spec_(spec) {
  m_ = basis_count(spec);
  switch (spec.family) {
    case Family::Chebyshev:
    case Family::Jacobi: {
      std::vector<Coeffs> polys;
      if (spec.family == Family::Chebyshev) {
        polys = chebyshev_polys(spec.poly_degree);
      } else if (spec.jacobi_printed && spec.poly_degree == 4 &&
                 spec.jacobi_alpha == 1.0 && spec.jacobi_beta == 1.0) {
        polys = jacobi_printed_polys();
      } else {
        polys = jacobi_polys(spec.poly_degree, spec.jacobi_alpha,
                             spec.jacobi_beta);
      }
      poly_stride_ = spec.poly_degree + 1;
      poly_.assign(static_cast<std::size_t>(m_) * 4 *
                       static_cast<std::size_t>(poly_stride_),
                   0.0);
      for (int r = 0; r < m_; ++r) {
        Coeffs c = polys[static_cast<std::size_t>(r)];
        for (int q = 0; q < 4; ++q) {
          double* row = poly_.data() +
                        (static_cast<std::size_t>(r) * 4 + static_cast<std::size_t>(q)) *
                            static_cast<std::size_t>(poly_stride_);
          std::memcpy(row, c.data(), c.size() * sizeof(double));
          c = differentiate(c);
        }
      }
      break;
    }
    case Family::Grbf: {
      centers_.resize(static_cast<std::size_t>(spec.n_centers));
      for (int r = 0; r < spec.n_centers; ++r)
        centers_[static_cast<std::size_t>(r)] =
            -1.0 + 2.0 * r / (spec.n_centers - 1);
      break;
    }
    case Family::BSpline: {
      int g = spec.spline_grid, d = spec.spline_degree;
      double h = 2.0 / (g - 1);
      int nknots = g + 2 * d;
      knots_.resize(static_cast<std::size_t>(nknots));
      for (int i = 0; i < nknots; ++i)
        knots_[static_cast<std::size_t>(i)] = -1.0 + (i - d) * h;
      scratch_.resize(static_cast<std::size_t>((d + 1) * nknots));
      break;
    }
    default:
      break;
  }
}

void BasisEval::bspline_tables(double z, int order, double* B, double* B1,
                               double* B2, double* B3) {
  const int d = spec_.spline_degree;
  const int nknots = static_cast<int>(knots_.size());
  const double h = 2.0 / (spec_.spline_grid - 1);
  const double* t = knots_.data();

  // degree pyramid, all levels kept for the derivative differences
  double* lvl0 = scratch_.data();
  for (int i = 0; i + 1 < nknots; ++i)
    lvl0[i] = (z >= t[i] && z < t[i + 1]) ? 1.0 : 0.0;
  for (int q = 1; q <= d; ++q) {
    const double* lo = scratch_.data() + (q - 1) * nknots;
    double* hi = scratch_.data() + q * nknots;
    double qh = q * h;
    for (int i = 0; i + q + 1 < nknots; ++i)
      hi[i] = (z - t[i]) / qh * lo[i] + (t[i + q + 1] - z) / qh * lo[i + 1];
  }

  const double* top = scratch_.data() + d * nknots;
  for (int i = 0; i < m_; ++i) B[i] = top[i];
  if (order >= 1) {
    const double* l = scratch_.data() + (d - 1) * nknots;
    for (int i = 0; i < m_; ++i) B1[i] = (l[i] - l[i + 1]) / h;
  }
  if (order >= 2) {
    if (d >= 2) {
      const double* l = scratch_.data() + (d - 2) * nknots;
      for (int i = 0; i < m_; ++i)
        B2[i] = (l[i] - 2.0 * l[i + 1] + l[i + 2]) / (h * h);
    } else {
      for (int i = 0; i < m_; ++i) B2[i] = 0.0;
    }
  }
  if (order >= 3) {
    if (d >= 3) {
      const double* l = scratch_.data() + (d - 3) * nknots;
      for (int i = 0; i < m_; ++i)
        B3[i] = (l[i] - 3.0 * l[i + 1] + 3.0 * l[i + 2] - l[i + 3]) /
                (h * h * h);
    } else {
      for (int i = 0; i < m_; ++i) B3[i] = 0.0;
    }
  }
}

void BasisEval::tables(double z, int order, double* B, double* B1, double* B2,
                       double* B3) {
  switch (spec_.family) {
    case Family::BSpline:
      bspline_tables(z, order, B, B1, B2, B3);
      return;
    case Family::Grbf: {
      double s = spec_.sigma * spec_.sigma;
      for (int r = 0; r < m_; ++r) {
        double dd = z - centers_[static_cast<std::size_t>(r)];
        double e = std::exp(-dd * dd / s);
        B[r] = e;
        if (order >= 1) B1[r] = -2.0 * dd / s * e;
        if (order >= 2) B2[r] = (-2.0 / s + 4.0 * dd * dd / (s * s)) * e;
        if (order >= 3)
          B3[r] = (12.0 * dd / (s * s) - 8.0 * dd * dd * dd / (s * s * s)) * e;
      }
      return;
    }
    case Family::Fourier: {
      int k = spec_.fourier_k;
      for (int r = 1; r <= k; ++r) {
        double c = std::cos(r * z), sn = std::sin(r * z);
        double rr = static_cast<double>(r);
        B[r - 1] = c;
        B[k + r - 1] = sn;
        if (order >= 1) {
          B1[r - 1] = -rr * sn;
          B1[k + r - 1] = rr * c;
        }
        if (order >= 2) {
          B2[r - 1] = -rr * rr * c;
          B2[k + r - 1] = -rr * rr * sn;
        }
        if (order >= 3) {
          B3[r - 1] = rr * rr * rr * sn;
          B3[k + r - 1] = -rr * rr * rr * c;
        }
      }
      return;
    }
    case Family::Chebyshev:
    case Family::Jacobi: {
      for (int r = 0; r < m_; ++r) {
        const double* rows =
            poly_.data() + static_cast<std::size_t>(r) * 4 *
                               static_cast<std::size_t>(poly_stride_);
        B[r] = horner(rows, poly_stride_, z);
        if (order >= 1) B1[r] = horner(rows + poly_stride_, poly_stride_, z);
        if (order >= 2) B2[r] = horner(rows + 2 * poly_stride_, poly_stride_, z);
        if (order >= 3) B3[r] = horner(rows + 3 * poly_stride_, poly_stride_, z);
      }
      return;
    }
    default:
      throw ConfigError("basis tables requested for an MLP family");
  }
}

std::vector<double> basis_values(const FamilySpec& spec, double z) {
  BasisEval be(spec);
  std::vector<double> out(static_cast<std::size_t>(be.count()));
  be.values(z, out.data());
  return out;
}

double edge_activation(const FamilySpec& spec, std::span<const double> coeffs,
                       double z, double lambda0, double lambda1) {
  int m = basis_count(spec);
  if (static_cast<int>(coeffs.size()) != m)
    throw ConfigError("edge coefficient count " + std::to_string(coeffs.size()) +
                      " does not match basis count " + std::to_string(m));
  BasisEval be(spec);
  std::vector<double> B(static_cast<std::size_t>(m));
  be.values(normalize_input(spec, z), B.data());
  double acc = 0.0;
  for (int r = 0; r < m; ++r) acc += coeffs[static_cast<std::size_t>(r)] * B[static_cast<std::size_t>(r)];
  if (spec.silu_blend && spec.family == Family::BSpline)
    return lambda0 * ad::silu_derivs(z).u0 + lambda1 * acc;
  return acc;
}

}  // namespace pinnkan::basis
