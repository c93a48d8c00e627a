#pragma once

// Independent reference computations. Nothing here calls into the routine it
// is used to check; each oracle re-derives its value by a different route
// (finite differences, quadrature, Sturm bisection, dense eigensolvers,
// direct summation).

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace revival::oracle {

using Fn = std::function<double(double)>;

/// Five-point central difference of the given order (1..3) with step h.
double central_difference(const Fn& f, double x, double h, int order);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Ridders' extrapolation of central differences (order 1..3), starting at
/// step h0 and shrinking by 1.4 per stage.
Estimate ridders(const Fn& f, double x, double h0, int order);

/// 2 * integral_0^1 sin(m pi x) x sin(n pi x) dx by adaptive Gauss-Kronrod.
double box_position_quadrature(int m, int n);

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by
/// Sturm-count bisection.
double sturm_eigenvalue(std::span<const double> diag,
                        std::span<const double> off, int k);

/// Mathieu characteristic value by dense diagonalization of the (2M+1)
/// Fourier matrix, picking the eigenvector with the largest weight on k = 0.
struct DenseMathieu {
  double a = 0.0;
  double weight_k0 = 0.0;  // |v_0|^2 of the selected eigenvector
};
DenseMathieu dense_mathieu(double nu, double q, int M);

/// sum_n |xi_n|^2 exp(-i E_n t / hbar), term by term in long double.
std::complex<double> phase_sum(std::span<const double> weights,
                               std::span<const double> energies, double t,
                               double hbar);

/// Sampled Gaussian |C_n|^2 normalized by brute-force summation.
std::vector<double> gaussian_populations(double center, double delta_n,
                                         int n_min, int n_max);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace revival::oracle
