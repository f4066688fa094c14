#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pinnkan::basis {

enum class Family : std::uint8_t {
  Tanh,       // plain MLP activation
  ParamTanh,  // tanh(a * (.) + b) with one global learnable (a, b) pair
  BSpline,
  Grbf,
  Fourier,
  Chebyshev,
  Jacobi,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// MLP families apply the activation to an affine combination; the rest expand
// each edge in a learnable basis.
inline bool is_mlp(Family f) {
  return f == Family::Tanh || f == Family::ParamTanh;
}

struct FamilySpec {
  Family family = Family::Tanh;

  // B-spline: grid points on [-1,1]; knots extend `spline_degree` spacings
  // past each end, giving spline_grid + spline_degree - 1 bases.
  int spline_grid = 8;
  int spline_degree = 3;

  // GRBF: fixed uniform centers on [-1,1], exp(-(z - t_r)^2 / sigma^2).
  int n_centers = 8;
  double sigma = 1.0;

  // Fourier: harmonics cos(rz), sin(rz) for r = 1..fourier_k, plus one
  // learnable bias per output unit handled by the network layout.
  int fourier_k = 4;

  // Chebyshev / Jacobi polynomial degree (bases 0..poly_degree).
  int poly_degree = 4;
  double jacobi_alpha = 1.0;
  double jacobi_beta = 1.0;
  // Use the published fixed Jacobi polynomials (valid for degree 4 and
  // alpha = beta = 1; note their scaling differs from the classical
  // normalization and the printed degree-4 polynomial vanishes at +-1).
  // When false, or when the hyperparameters leave the printed regime, the
  // classical three-term recurrence is used instead.
  bool jacobi_printed = true;

  // Optional B-spline residual blend: lambda0*silu(z) + lambda1*spline(z).
  bool silu_blend = false;
};

// Number of basis functions per edge. Zero for MLP families.
int basis_count(const FamilySpec& spec);

// Squash into the basis domain: tanh for B-spline/GRBF/Chebyshev/Jacobi,
// identity for Fourier. MLP families do not use this path.
double normalize_input(const FamilySpec& spec, double z);
inline bool uses_tanh_normalization(Family f) {
  return f == Family::BSpline || f == Family::Grbf ||
         f == Family::Chebyshev || f == Family::Jacobi;
}

// Evaluates all basis functions and their first three derivatives at a
// pre-normalized z. One instance per worker; tables() reuses scratch and
// never allocates.
class BasisEval {
 public:
  explicit BasisEval(const FamilySpec& spec);

  int count() const { return m_; }

  // Fills B with values and, for order >= 1..3, B1/B2/B3 with derivatives.
  // Pointers for rows above `order` may be null.
  void tables(double z, int order, double* B, double* B1, double* B2,
              double* B3);

  void values(double z, double* B) { tables(z, 0, B, nullptr, nullptr, nullptr); }

 private:
  void bspline_tables(double z, int order, double* B, double* B1, double* B2,
                      double* B3);

  FamilySpec spec_;
  int m_ = 0;
  // poly families: value/d1/d2/d3 coefficient rows per basis, padded to the
  // full degree
  std::vector<double> poly_;
  int poly_stride_ = 0;
  std::vector<double> knots_;
  std::vector<double> centers_;
  std::vector<double> scratch_;  // B-spline degree pyramid
};

// Convenience wrapper for tests and small callers.
std::vector<double> basis_values(const FamilySpec& spec, double z);

// Reference edge activation on raw (un-normalized) input:
//   sum_r coeffs[r] * B_r(normalize(z))
// and with silu_blend: lambda0*silu(z) + lambda1 * spline part.
// Throws ConfigError if coeffs.size() != basis_count.
double edge_activation(const FamilySpec& spec, std::span<const double> coeffs,
                       double z, double lambda0 = 1.0, double lambda1 = 1.0);

}  // namespace pinnkan::basis
