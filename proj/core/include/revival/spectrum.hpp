#pragma once

#include <Eigen/Dense>

namespace revival {

/// Unperturbed one-dimensional spectrum E_n in dimensionless units
/// (m = L = 1, unit drive frequency). Level indices may be real so that
/// derivative checks can probe between levels; physical states use integers.
struct SpectrumModel {
  enum class Kind { Box, PowerLaw };

  Kind kind = Kind::Box;
  double hbar_eff = 1.0;
  double c = 1.0;  // PowerLaw prefactor
  double k = 2.0;  // PowerLaw exponent

  /// E_n = pi^2 hbar^2 n^2 / 2.
  static SpectrumModel box(double hbar_eff);
  /// E_n = c n^k with c, k > 0.
  static SpectrumModel power_law(double c, double k, double hbar_eff);
};

struct EnergyDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

struct CouplingModel {
  enum class Mode { ConstantV, BoxPosition };

  Mode mode = Mode::ConstantV;
  double V = 1.0;
};

/// Throws DomainError for n < 1.
double energy(const SpectrumModel& model, double n);

/// Analytic derivatives of E in the continuous level index at r. Orders above
/// max_order are left at zero.
EnergyDerivs energy_derivs(const SpectrumModel& model, double r,
                           int max_order = 3);

/// Solves N E'(r) = hbar_eff by bisection on [1, n_max_search] to relative
/// tolerance 1e-12. Throws NoResonance when the bracket holds no root.
double find_resonant_level(const SpectrumModel& model, int N,
                           double n_max_search = 1e7);

/// Real-symmetric coupling matrix over levels n_min..n_max (row i is level
/// n_min + i).
///
/// ConstantV puts V on the +-N diagonals. BoxPosition uses V <m|x|n> for the
/// unit box: 1/2 on the diagonal, -8mn / (pi^2 (m^2 - n^2)^2) when m + n is
/// odd and zero otherwise; N is ignored.
Eigen::MatrixXd coupling_matrix(const CouplingModel& coupling, int n_min,
                                int n_max, int N);

}  // namespace revival
