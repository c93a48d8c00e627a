#pragma once

#include <span>
#include <vector>

namespace revival {

/// Eigenvalues of the real symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (off[i] couples i and i+1; off.size() must be
/// diag.size() - 1), sorted ascending. Implicit QL with Wilkinson shifts.
/// Throws ConvergenceError after 60 sweeps on one eigenvalue.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> off);

}  // namespace revival
