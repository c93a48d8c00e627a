#include "revival/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "revival/errors.hpp"
#include "revival/tridiagonal.hpp"

namespace revival {

namespace {

void require_fractional(double nu) {
  if (std::abs(nu - std::round(nu)) <= 1e-6) {
    throw DegenerateOrder("Mathieu order nu = " + std::to_string(nu) +
                          " is (numerically) an integer");
  }
}

void require_nonsingular(double nu) {
  if (std::abs(nu * nu - 1.0) <= 1e-6) {
    throw SingularOrder(
        "nu^2 = 1: the second-order series is singular (only the "
        "non-resonant case nu != +-1 is covered)");
  }
}

// Eigenvalue continuing nu^2 for the truncation M. Jacobi matrices have simple
// spectra, so eigenvalues keep their sorted rank as |q| grows from 0.
double continued_eigenvalue(double nu, double q, int M) {
  const int size = 2 * M + 1;
  std::vector<double> diag(size);
  const double nu_sq = nu * nu;
  int rank = 0;
  for (int k = -M; k <= M; ++k) {
    const double x = nu + 2.0 * k;
    diag[k + M] = x * x;
    if (k != 0 && x * x < nu_sq) ++rank;
  }
  if (q == 0.0) return nu_sq;

  // The spectrum depends on q only through q^2.
  std::vector<double> off(size - 1, std::abs(q));
  const auto eig = tridiagonal_eigenvalues(diag, off);
  return eig[rank];
}

double series_derivative(double nu, double q, int order) {
  require_nonsingular(nu);
  const double q2 = q * q;
  const double w = nu * nu - 1.0;
  switch (order) {
    case 1:
      return 2.0 * nu - q2 * nu / (w * w);
    case 2:
      return 2.0 + q2 * (3.0 * nu * nu + 1.0) / (w * w * w);
    case 3:
      return -12.0 * q2 * nu * (nu * nu + 1.0) / (w * w * w * w);
    default:
      throw DomainError("derivative order must be 1..3");
  }
}

}  // namespace

MathieuChar char_value_matrix(double nu, double q, int M) {
  require_fractional(nu);
  if (M < 8) throw DomainError("truncation M must be >= 8");

  MathieuChar out;
  out.nu = nu;
  out.q = q;
  out.method = MathieuMethod::Matrix;
  out.truncation = M;
  out.a = continued_eigenvalue(nu, q, M);
  out.err_estimate = std::abs(out.a - continued_eigenvalue(nu, q, M / 2));

  if (M >= kMaxTruncation && out.err_estimate > 1e-8) {
    throw ConvergenceError("Mathieu matrix method not converged at M = " +
                           std::to_string(M) + " (gap " +
                           std::to_string(out.err_estimate) + ")");
  }
  return out;
}

MathieuChar char_value_converged(double nu, double q) {
  MathieuChar ch;
  for (int M = 16; M <= kMaxTruncation; M *= 2) {
    ch = char_value_matrix(nu, q, M);
    if (ch.err_estimate <= 1e-13 * std::max(1.0, std::abs(ch.a))) break;
  }
  return ch;
}

double char_value_series(double nu, double q) {
  require_nonsingular(nu);
  return nu * nu + q * q / (2.0 * (nu * nu - 1.0));
}

double da_dnu(double nu, double q, int order, MathieuMethod method) {
  if (order < 1 || order > 3) {
    throw DomainError("derivative order must be 1..3");
  }
  if (method == MathieuMethod::Series) return series_derivative(nu, q, order);

  const int M = char_value_converged(nu, q).truncation;
  auto a = [&](double x) { return char_value_matrix(x, q, M).a; };
  switch (order) {
    case 1: {
      const double h = 1e-4;
      return (a(nu + h) - a(nu - h)) / (2.0 * h);
    }
    case 2: {
      const double h = 1e-4;
      return (a(nu + h) - 2.0 * a(nu) + a(nu - h)) / (h * h);
    }
    default: {
      const double h = 1e-3;
      return (a(nu + 2.0 * h) - 2.0 * a(nu + h) + 2.0 * a(nu - h) -
              a(nu - 2.0 * h)) /
             (2.0 * h * h * h);
    }
  }
}

}  // namespace revival
