#pragma once

#include <vector>

namespace pinnkan::diag {

// Eigenvalues of a dense symmetric matrix (row-major n x n), sorted
// descending. The input is symmetrized as (A + A^T)/2 first. Cyclic Jacobi
// rotations run until the off-diagonal Frobenius norm drops below
// 1e-12 * ||A||_F; throws NumericError with the residual if that never
// happens within the sweep budget.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

}  // namespace pinnkan::diag
