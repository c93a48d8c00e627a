#include "revival/quasienergy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "revival/errors.hpp"
#include "revival/mathieu.hpp"

namespace revival {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

// period = numerator / |rate|, infinite at rate = 0.
double period(double numerator, double rate) {
  return rate == 0.0 ? kInf : numerator / std::abs(rate);
}

double relative(double paper, double definition) {
  if (std::isinf(paper) && std::isinf(definition)) return 0.0;
  if (std::isinf(paper) || std::isinf(definition) || definition == 0.0) {
    return kInf;
  }
  return std::abs(paper - definition) / std::abs(definition);
}

ModeTimes paper_times(double beta, double q, double nu, double hbar) {
  const double w = nu * nu - 1.0;
  const double q2 = q * q;
  const double t0 = 2.0 * kPi * hbar / beta;

  const double cl = t0 * (2.0 * nu - q2 * nu / (w * w));
  const double rev = 2.0 * t0 * (2.0 + q2 * (3.0 * nu * nu - 1.0) / (w * w * w));
  const double sr =
      q == 0.0 ? kInf : 6.0 * t0 * (q2 / 2.0) * 36.0 * nu * nu / (w * w * w * w);

  ModeTimes out;
  out.T_cl = std::abs(cl);
  out.T_rev = std::abs(rev);
  out.T_sr = std::abs(sr);
  out.sign_cl = sign_of(cl);
  out.sign_rev = sign_of(rev);
  out.sign_sr = sign_of(sr);
  return out;
}

}  // namespace

CanonicalCoeffs canonical_coeffs(const SpectrumModel& model,
                                 const ResonanceParams& params) {
  if (params.N < 1) throw DomainError("resonance order N must be >= 1");
  const auto d = energy_derivs(model, params.r, 3);
  const double n3 = std::pow(static_cast<double>(params.N), 3);

  CanonicalCoeffs c;
  c.beta = n3 * d.d2 / 4.0;
  if (c.beta == 0.0) {
    throw FlatSpectrum("E''(r) = 0: beta vanishes and no Mathieu form exists");
  }
  c.alpha_mag = n3 * d.d3 / 6.0;
  c.gamma_mag = params.N * d.d1 - params.hbar_eff;
  c.omega_sq = c.gamma_mag * c.gamma_mag / (4.0 * c.beta * c.beta);
  c.q_paper = params.lambda * params.V / c.beta;
  c.q_std = -params.lambda * params.V / (2.0 * c.beta);
  const double damped = c.alpha_mag * c.omega_sq + c.gamma_mag;
  c.a_offset = damped * damped / (4.0 * c.beta * c.beta);
  return c;
}

double nu_of_n(double n, const ResonanceParams& params) {
  return 2.0 * (n - params.r) / params.N;
}

double q_used(const CanonicalCoeffs& coeffs, Convention convention,
              Jacobian jacobian) {
  const double q =
      convention == Convention::PaperQ ? coeffs.q_paper : coeffs.q_std;
  return jacobian == Jacobian::Strict ? 4.0 * q : q;
}

double effective_beta(const CanonicalCoeffs& coeffs, Jacobian jacobian) {
  return jacobian == Jacobian::Strict ? coeffs.beta / 4.0 : coeffs.beta;
}

double quasi_energy(double nu, const CanonicalCoeffs& coeffs,
                    const QuasiEnergyOptions& options) {
  const double q = q_used(coeffs, options.convention, options.jacobian);
  const double beta = effective_beta(coeffs, options.jacobian);
  switch (options.source) {
    case QuasiEnergySource::Series:
      return beta * char_value_series(nu, q);
    case QuasiEnergySource::MatrixFloquet:
      return beta * char_value_converged(nu, q).a + coeffs.beta * coeffs.a_offset;
  }
  return 0.0;
}

std::array<double, 3> quasi_energy_derivs(const CanonicalCoeffs& coeffs,
                                          double nu_r, int N,
                                          Convention convention,
                                          Jacobian jacobian) {
  const double q = q_used(coeffs, convention, jacobian);
  const double beta = effective_beta(coeffs, jacobian);
  const double dnu_dn = 2.0 / N;
  std::array<double, 3> out{};
  double chain = beta;
  for (int j = 1; j <= 3; ++j) {
    chain *= dnu_dn;
    out[j - 1] = chain * da_dnu(nu_r, q, j, MathieuMethod::Series);
  }
  return out;
}

TimeScalesReport time_scales(const CanonicalCoeffs& coeffs,
                             const TimeScaleQuery& query) {
  if (query.N < 1) throw DomainError("resonance order N must be >= 1");
  if (!(query.hbar_eff > 0.0)) throw DomainError("hbar_eff must be positive");
  if (std::abs(query.nu_r * query.nu_r - 1.0) <= 1e-6) {
    throw SingularOrder(
        "nu_r = +-1 is the resonant case; time scales are only defined in "
        "the non-resonant situation");
  }

  TimeScalesReport rep;
  rep.nu_r = query.nu_r;
  rep.q_used = q_used(coeffs, query.convention, query.jacobian);
  rep.beta = effective_beta(coeffs, query.jacobian);
  rep.hbar_eff = query.hbar_eff;
  rep.N = query.N;
  rep.convention = query.convention;
  rep.jacobian = query.jacobian;
  rep.large_lambda_warning = std::abs(query.lambda) >= 0.5;
  rep.eps_derivs = quasi_energy_derivs(coeffs, query.nu_r, query.N,
                                       query.convention, query.jacobian);

  const double hbar = query.hbar_eff;
  if (query.modes != ReportModes::Paper) {
    const auto& e = rep.eps_derivs;
    ModeTimes def;
    def.T_cl = period(2.0 * kPi * hbar, e[0]);
    def.T_rev = period(4.0 * kPi * hbar, e[1]);
    def.T_sr = period(12.0 * kPi * hbar, e[2]);
    def.sign_cl = sign_of(e[0]);
    def.sign_rev = sign_of(e[1]);
    def.sign_sr = sign_of(e[2]);
    rep.definition = def;
    rep.T_cl_lab = period(2.0 * kPi * hbar, hbar / query.N + e[0]);
  }
  if (query.modes != ReportModes::Definition) {
    rep.paper = paper_times(rep.beta, rep.q_used, query.nu_r, hbar);
  }
  if (rep.definition && rep.paper) {
    Discrepancy d;
    d.T_cl = relative(rep.paper->T_cl, rep.definition->T_cl);
    d.T_rev = relative(rep.paper->T_rev, rep.definition->T_rev);
    d.T_sr = relative(rep.paper->T_sr, rep.definition->T_sr);
    d.jacobian_factor = 2.0 / query.N;
    rep.discrepancy = d;
  }
  return rep;
}

TimeScalesReport time_scales(const SpectrumModel& model,
                             const ResonanceParams& params, double center,
                             ReportModes modes, Convention convention,
                             Jacobian jacobian) {
  const auto coeffs = canonical_coeffs(model, params);
  TimeScaleQuery query;
  query.nu_r = nu_of_n(center, params);
  query.N = params.N;
  query.hbar_eff = params.hbar_eff;
  query.lambda = params.lambda;
  query.modes = modes;
  query.convention = convention;
  query.jacobian = jacobian;
  return time_scales(coeffs, query);
}

const char* to_string(Convention c) {
  return c == Convention::PaperQ ? "paperq" : "stdq";
}

const char* to_string(Jacobian j) {
  return j == Jacobian::Strict ? "strict" : "as_printed";
}

}  // namespace revival
