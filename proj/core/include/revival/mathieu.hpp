#pragma once

namespace revival {

enum class MathieuMethod { Series, Matrix };

/// Characteristic value a_nu(q) of y'' + (a - 2q cos 2z) y = 0 for a
/// fractional Floquet exponent nu.
struct MathieuChar {
  double nu = 0.0;
  double q = 0.0;
  double a = 0.0;
  MathieuMethod method = MathieuMethod::Matrix;
  int truncation = 0;         // M, Matrix only
  double err_estimate = 0.0;  // |a(M) - a(M/2)|
};

/// Largest truncation tried before giving up.
inline constexpr int kMaxTruncation = 512;

/// Eigenvalue of the (2M+1)-square tridiagonal matrix with diagonal
/// (nu + 2k)^2, k = -M..M, and off-diagonal q that continues nu^2 from q = 0.
///
/// Throws DegenerateOrder when nu is within 1e-6 of an integer, DomainError
/// for M < 8, and ConvergenceError when M >= 512 and the M vs M/2 gap still
/// exceeds 1e-8.
MathieuChar char_value_matrix(double nu, double q, int M = 32);

/// Doubles M from 16 until the convergence gap is at rounding level (or M
/// reaches 512).
MathieuChar char_value_converged(double nu, double q);

/// nu^2 + q^2 / (2 (nu^2 - 1)). Throws SingularOrder when |nu^2 - 1| <= 1e-6.
double char_value_series(double nu, double q);

/// order-th derivative of a_nu(q) with respect to nu (order 1..3).
///
/// Series: closed-form derivatives of char_value_series. Matrix: central
/// differences of char_value_matrix at a truncation fixed by the centre point,
/// step 1e-4 for orders 1-2 and 1e-3 for order 3.
double da_dnu(double nu, double q, int order, MathieuMethod method);

}  // namespace revival
