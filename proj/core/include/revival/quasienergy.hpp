#pragma once

#include <array>
#include <optional>

#include "revival/spectrum.hpp"

namespace revival {

/// Drive and resonance configuration.
struct ResonanceParams {
  int N = 1;              // resonance order
  double r = 1.0;         // resonance centre (may be non-integer)
  double lambda = 0.0;    // modulation strength
  double V = 1.0;         // constant coupling matrix element
  double hbar_eff = 1.0;

  /// Perturbative outputs are flagged once lambda >= 0.5.
  bool large_lambda() const { return lambda >= 0.5 || lambda <= -0.5; }
};

/// Coefficients of the third-order angle equation and its Mathieu reduction.
/// alpha and gamma are purely imaginary; their real magnitudes are stored.
struct CanonicalCoeffs {
  double alpha_mag = 0.0;  // N^3 E''' / 6
  double beta = 0.0;       // N^3 E'' / 4
  double gamma_mag = 0.0;  // N E' - hbar
  double omega_sq = 0.0;   // gamma_mag^2 / (4 beta^2)
  double q_paper = 0.0;    // lambda V / beta   (+q cos 2z form)
  double q_std = 0.0;      // -lambda V / (2 beta)  (a - 2q cos 2z form)
  double a_offset = 0.0;   // (alpha_mag omega^2 + gamma_mag)^2 / (4 beta^2) >= 0
};

/// Which Mathieu q the quasi-energy is evaluated with.
enum class Convention { PaperQ, StandardQ };

/// AsPrinted keeps the reduction as written (no 1/4 from theta = 2z + pi/2).
/// Strict applies that Jacobian: beta -> beta / 4, q -> 4 q.
enum class Jacobian { AsPrinted, Strict };

enum class QuasiEnergySource { Series, MatrixFloquet };

struct QuasiEnergyOptions {
  QuasiEnergySource source = QuasiEnergySource::Series;
  Convention convention = Convention::PaperQ;
  Jacobian jacobian = Jacobian::AsPrinted;
};

/// Throws FlatSpectrum when E''(r) = 0.
CanonicalCoeffs canonical_coeffs(const SpectrumModel& model,
                                 const ResonanceParams& params);

/// nu_n = 2 (n - r) / N. Real n is accepted for derivative checks.
double nu_of_n(double n, const ResonanceParams& params);

/// Mathieu q for the given convention and Jacobian variant.
double q_used(const CanonicalCoeffs& coeffs, Convention convention,
              Jacobian jacobian = Jacobian::AsPrinted);

/// Curvature prefactor multiplying a_nu in the quasi-energy.
double effective_beta(const CanonicalCoeffs& coeffs, Jacobian jacobian);

/// Series: beta (nu^2 + q^2 / (2 (nu^2 - 1))).
/// MatrixFloquet: beta a_matrix(nu, q) + beta a_offset.
/// The positive form (+beta a) is used throughout.
double quasi_energy(double nu, const CanonicalCoeffs& coeffs,
                    const QuasiEnergyOptions& options = {});

enum class ReportModes { Definition, Paper, Both };

/// Periods for one computation mode, reported as magnitudes with the sign of
/// the underlying derivative kept separately. Infinite periods are +inf.
struct ModeTimes {
  double T_cl = 0.0;
  double T_rev = 0.0;
  double T_sr = 0.0;
  int sign_cl = 1;
  int sign_rev = 1;
  int sign_sr = 1;
};

/// Relative differences |paper - definition| / |definition| per scale.
struct Discrepancy {
  double T_cl = 0.0;
  double T_rev = 0.0;
  double T_sr = 0.0;
  /// d nu / d n = 2 / N, applied in definition mode and absent from the
  /// printed products.
  double jacobian_factor = 0.0;
};

struct TimeScalesReport {
  double nu_r = 0.0;
  double q_used = 0.0;
  double beta = 0.0;  // effective beta (after the Jacobian variant)
  double hbar_eff = 1.0;
  int N = 1;
  Convention convention = Convention::PaperQ;
  Jacobian jacobian = Jacobian::AsPrinted;
  bool large_lambda_warning = false;

  /// d^j eps / dn^j at the packet centre, j = 1..3 (definition mode).
  std::array<double, 3> eps_derivs{};
  std::optional<ModeTimes> definition;
  std::optional<ModeTimes> paper;
  /// 2 pi hbar / |hbar / N + eps'|: classical period of the lab-frame
  /// autocorrelation, where each level also carries the frame phase
  /// (n - r) hbar / N. Definition mode only.
  std::optional<double> T_cl_lab;
  std::optional<Discrepancy> discrepancy;
};

struct TimeScaleQuery {
  double nu_r = 0.0;
  int N = 1;
  double hbar_eff = 1.0;
  double lambda = 0.0;  // only used for the large-lambda warning
  ReportModes modes = ReportModes::Both;
  Convention convention = Convention::PaperQ;
  Jacobian jacobian = Jacobian::AsPrinted;
};

/// Closed-form level-index derivatives of the series quasi-energy,
/// d^j eps / dn^j = beta (2/N)^j d^j a / d nu^j.
std::array<double, 3> quasi_energy_derivs(const CanonicalCoeffs& coeffs,
                                          double nu_r, int N,
                                          Convention convention,
                                          Jacobian jacobian);

/// Throws SingularOrder for nu_r = +-1.
TimeScalesReport time_scales(const CanonicalCoeffs& coeffs,
                             const TimeScaleQuery& query);

/// Convenience overload: coefficients from the spectrum at params.r and
/// nu_r = nu_of_n(center).
TimeScalesReport time_scales(const SpectrumModel& model,
                             const ResonanceParams& params, double center,
                             ReportModes modes = ReportModes::Both,
                             Convention convention = Convention::PaperQ,
                             Jacobian jacobian = Jacobian::AsPrinted);

const char* to_string(Convention c);
const char* to_string(Jacobian j);

}  // namespace revival
