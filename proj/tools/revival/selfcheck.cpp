#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

#include "revival/fingerprint.hpp"
#include "revival/mathieu.hpp"
#include "revival/oracle/oracles.hpp"
#include "revival/propagate.hpp"
#include "revival/quasienergy.hpp"
#include "revival/spectrum.hpp"

namespace revival::cli {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_diff(double value, double reference) {
  if (value == reference) return 0.0;
  const double scale = std::max(std::abs(reference), 1e-300);
  return std::abs(value - reference) / scale;
}

CheckRow oracle_row(std::string name, double value, double reference,
                    double tolerance) {
  CheckRow row{"oracle", std::move(name), value, reference,
               rel_diff(value, reference), tolerance, ""};
  row.status = row.rel_diff <= tolerance ? "pass" : "fail";
  return row;
}

// Absolute-error oracle: value is the measured error, reference is zero.
CheckRow bound_row(std::string name, double value, double bound) {
  CheckRow row{"oracle", std::move(name), value, 0.0, value, bound, ""};
  row.status = value <= bound ? "pass" : "fail";
  return row;
}

CheckRow ledger_row(std::string name, double printed, double derived) {
  CheckRow row{"discrepancy", std::move(name), printed, derived,
               rel_diff(printed, derived), 0.0, ""};
  row.status = row.rel_diff < 1e-12 ? "agrees" : "discrepancy";
  return row;
}

CheckRow failed_row(std::string name, const std::exception& e) {
  CheckRow row{"oracle", std::move(name), std::nan(""), std::nan(""),
               std::nan(""), 0.0, "fail"};
  row.status = std::string("fail: ") + e.what();
  std::replace(row.status.begin(), row.status.end(), ',', ';');
  return row;
}

template <typename F>
void guarded(std::vector<CheckRow>& rows, const std::string& name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    rows.push_back(failed_row(name, e));
  }
}

void spectrum_checks(const RunConfig& cfg, double beta_scale,
                     std::vector<CheckRow>& rows) {
  const auto params = cfg.params();
  const auto& model = cfg.spectrum;
  const double r = params.r;
  oracle::Fn E = [&](double n) { return energy(model, n); };
  const auto d = energy_derivs(model, r, 3);
  const double h = 1e-2 * std::max(1.0, r);

  guarded(rows, "spectrum_d1_ridders", [&] {
    auto est = oracle::ridders(E, r, h, 1);
    rows.push_back(oracle_row("spectrum_d1_ridders", d.d1, est.value, 1e-8));
  });
  guarded(rows, "spectrum_d2_ridders", [&] {
    auto est = oracle::ridders(E, r, h, 2);
    rows.push_back(oracle_row("spectrum_d2_ridders", d.d2, est.value, 1e-7));
  });
  guarded(rows, "resonance_condition", [&] {
    const double root = find_resonant_level(model, params.N);
    const double lhs = params.N * energy_derivs(model, root, 1).d1;
    rows.push_back(oracle_row("resonance_condition", lhs, model.hbar_eff, 1e-10));
  });
  guarded(rows, "canonical_beta_ridders", [&] {
    auto c = canonical_coeffs(model, params);
    c.beta *= beta_scale;
    const double n3 = std::pow(params.N, 3);
    auto est = oracle::ridders(E, r, h, 2);
    rows.push_back(
        oracle_row("canonical_beta_ridders", c.beta, n3 * est.value / 4.0, 1e-7));
  });
}

void coupling_checks(std::vector<CheckRow>& rows) {
  guarded(rows, "box_position_quadrature", [&] {
    CouplingModel cm{CouplingModel::Mode::BoxPosition, 1.0};
    const int n_max = 12;
    const auto X = coupling_matrix(cm, 1, n_max, 1);
    double worst = 0.0;
    for (int m = 1; m <= n_max; ++m) {
      for (int n = 1; n <= n_max; ++n) {
        worst = std::max(worst, std::abs(X(m - 1, n - 1) -
                                         oracle::box_position_quadrature(m, n)));
      }
    }
    rows.push_back(bound_row("box_position_quadrature", worst, 1e-10));
  });
}

void mathieu_checks(std::vector<CheckRow>& rows) {
  guarded(rows, "mathieu_matrix_vs_dense", [&] {
    double worst = 0.0;
    for (double nu : {0.3, 1.7, 2.5, 3.3}) {
      for (double q : {0.1, 1.0, 4.0}) {
        const double a = char_value_matrix(nu, q, 32).a;
        const double ref = oracle::dense_mathieu(nu, q, 32).a;
        worst = std::max(worst, rel_diff(a, ref));
      }
    }
    rows.push_back(bound_row("mathieu_matrix_vs_dense", worst, 1e-10));
  });
  guarded(rows, "mathieu_series_order", [&] {
    double worst = 1e300;
    const std::vector<double> qs{0.05, 0.1, 0.2};
    for (double nu : {1.7, 2.5, 3.3}) {
      std::vector<double> gaps;
      for (double q : qs) {
        gaps.push_back(std::abs(char_value_series(nu, q) -
                                char_value_converged(nu, q).a));
      }
      worst = std::min(worst, oracle::loglog_slope(qs, gaps));
    }
    CheckRow row{"oracle", "mathieu_series_order", worst, 3.5, 0.0, 0.0, ""};
    row.status = worst >= 3.5 ? "pass" : "fail";
    rows.push_back(row);
  });
}

void quasienergy_checks(const RunConfig& cfg, double beta_scale,
                        std::vector<CheckRow>& rows) {
  // Closed-form n-derivatives against Ridders differences of the series
  // quasi-energy at nu_r = 2.5, q = 0.1.
  guarded(rows, "quasi_energy_derivs", [&] {
    CanonicalCoeffs c;
    c.beta = 1.0 * beta_scale;
    c.q_paper = 0.1;
    ResonanceParams p;
    p.N = 1;
    p.r = 10.0;
    const double n0 = p.r + 1.25;  // nu = 2.5
    const auto closed = quasi_energy_derivs(c, 2.5, 1, Convention::PaperQ,
                                            Jacobian::AsPrinted);
    CanonicalCoeffs plain = c;
    plain.beta = 1.0;
    oracle::Fn eps = [&](double n) { return quasi_energy(nu_of_n(n, p), plain); };
    for (int j = 1; j <= 3; ++j) {
      // Third differences need a wider stencil to rise above rounding; the
      // nearest pole sits 0.75 levels away.
      auto est = oracle::ridders(eps, n0, j == 3 ? 0.25 : 0.05, j);
      rows.push_back(oracle_row("quasi_energy_d" + std::to_string(j),
                                closed[j - 1], est.value, 1e-6));
    }
  });
  guarded(rows, "super_revival_slope", [&] {
    std::vector<double> qs, tsr;
    for (int i = 0; i <= 10; ++i) {
      const double q = 0.02 * std::pow(10.0, i / 10.0);
      CanonicalCoeffs c;
      c.beta = 1.0;
      c.q_paper = q;
      TimeScaleQuery query;
      query.nu_r = 2.5;
      query.modes = ReportModes::Definition;
      qs.push_back(q);
      tsr.push_back(time_scales(c, query).definition->T_sr);
    }
    const double slope = oracle::loglog_slope(qs, tsr);
    CheckRow row{"oracle", "super_revival_slope", slope, -2.0,
                 std::abs(slope + 2.0), 0.1, ""};
    row.status = row.rel_diff <= 0.1 ? "pass" : "fail";
    rows.push_back(row);
  });
  (void)cfg;
}

double max_abs_gap(const AutocorrTrace& a, const AutocorrTrace& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(std::abs(a.values[i]) - std::abs(b.values[i])));
  }
  return worst;
}

void propagation_checks(std::vector<CheckRow>& rows) {
  // Undriven box packet: exact revival at t* = 4 / (pi hbar).
  guarded(rows, "undriven_revival", [&] {
    const auto model = SpectrumModel::box(0.05);
    ResonanceParams p;
    p.hbar_eff = 0.05;
    p.r = 20.0;
    const auto window = default_window(20.0, 2.0, 1);
    const auto psi0 = init_gaussian(20.0, 2.0, window);
    const double t_star = 4.0 / (kPi * p.hbar_eff);
    EvolutionConfig ev;
    const int steps = static_cast<int>(std::ceil(t_star / ev.dt));
    ev.dt = t_star / steps;
    ev.t_max = t_star;
    ev.sample_stride = steps;
    CouplingModel cm;
    const auto V = coupling_matrix(cm, window.n_min, window.n_max, 1);
    const auto res = evolve(psi0, model, V, p, ev);
    CheckRow row{"oracle", "undriven_revival", res.trace.abs2(1), 0.999, 0.0,
                 0.0, ""};
    row.status = row.value >= 0.999 ? "pass" : "fail";
    rows.push_back(row);
  });

  // Driven box packet used by the frame, unitarity and reversal checks.
  const auto model = SpectrumModel::box(0.05);
  ResonanceParams p;
  p.hbar_eff = 0.05;
  p.r = 2.0;
  p.lambda = 0.05;
  const LevelWindow window{1, 48};
  const auto psi0 = init_gaussian(12.0, 1.5, window);
  CouplingModel cm{CouplingModel::Mode::BoxPosition, 1.0};
  const auto V = coupling_matrix(cm, window.n_min, window.n_max, 1);

  guarded(rows, "unitarity_1e4_steps", [&] {
    EvolutionConfig ev;
    ev.t_max = 1e4 * ev.dt;
    ev.sample_stride = 100;
    const auto res = evolve(psi0, model, V, p, ev);
    rows.push_back(bound_row("unitarity_1e4_steps", res.max_norm_drift, 1e-8));
  });
  guarded(rows, "frame_equivalence", [&] {
    EvolutionConfig ev;
    ev.t_max = 20.0 * kPi;
    const auto bare = evolve(psi0, model, V, p, ev);
    ev.frame = Frame::Rotating;
    const auto rot = evolve(psi0, model, V, p, ev);
    rows.push_back(bound_row("frame_equivalence", max_abs_gap(bare.trace, rot.trace),
                             1e-8));
  });
  guarded(rows, "time_reversal", [&] {
    auto prop = Propagator::full(model, V, p, window, Frame::Bare,
                                 Integrator::ExpMidpoint);
    Eigen::VectorXcd c(window.size());
    for (int i = 0; i < window.size(); ++i) c(i) = psi0.amps[i];
    const Eigen::VectorXcd start = c;
    const double dt = 2.0 * kPi / 200.0;
    const int steps = 2000;
    for (int k = 0; k < steps; ++k) prop.step(c, k * dt, dt);
    for (int k = steps; k > 0; --k) prop.step(c, k * dt, -dt);
    rows.push_back(bound_row("time_reversal", (c - start).norm(), 1e-6));
  });
}

}  // namespace

bool SelfcheckResult::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) {
    return r.kind != "oracle" || r.status == "pass";
  });
}

std::vector<CheckRow> discrepancy_ledger() {
  const double nu = 2.5;
  const double q = 0.1;
  const double nu2m1 = nu * nu - 1.0;
  std::vector<CheckRow> rows;

  CanonicalCoeffs c;
  c.beta = 1.0;
  c.q_paper = q;
  TimeScaleQuery query;
  query.nu_r = nu;
  query.modes = ReportModes::Both;
  const auto rep = time_scales(c, query);
  rows.push_back(ledger_row("T_cl", rep.paper->T_cl, rep.definition->T_cl));
  rows.push_back(ledger_row("T_rev", rep.paper->T_rev, rep.definition->T_rev));
  rows.push_back(ledger_row("T_sr", rep.paper->T_sr, rep.definition->T_sr));

  const double a1 = da_dnu(nu, q, 1, MathieuMethod::Series);
  const double a2 = da_dnu(nu, q, 2, MathieuMethod::Series);
  const double a3 = da_dnu(nu, q, 3, MathieuMethod::Series);
  rows.push_back(ledger_row("first_derivative_bracket",
                            2.0 * nu + (q * q / 2.0) * (-2.0 * nu) / (nu2m1 * nu2m1),
                            a1));
  rows.push_back(ledger_row(
      "second_derivative_bracket",
      2.0 + (q * q / 2.0) * 2.0 * (3.0 * nu * nu - 1.0) / std::pow(nu2m1, 3), a2));
  rows.push_back(ledger_row("third_derivative_bracket",
                            (q * q / 2.0) * 36.0 * nu * nu / std::pow(nu2m1, 4),
                            a3));
  rows.push_back(ledger_row("second_derivative_coefficient",
                            3.0 * nu * nu - 1.0, 3.0 * nu * nu + 1.0));
  rows.push_back(ledger_row("third_derivative_coefficient", 36.0 * nu * nu,
                            -24.0 * nu * (nu * nu + 1.0)));
  // Level-index chain rule: d nu / dn = 2 / N is absent from the printed forms.
  rows.push_back(ledger_row("level_jacobian", 1.0, 2.0));
  // Curvature prefactor of the angle equation (N = 1, E'' = 1): N^2 E''/2
  // where the coefficient definitions use N^3 E''/4.
  rows.push_back(ledger_row("curvature_prefactor", 0.5, 0.25));
  // Floquet form -beta a against the positive series form +beta a.
  const double a = char_value_series(nu, q);
  rows.push_back(ledger_row("quasi_energy_sign", -a, a));
  // theta = 2z + pi/2 substitution: beta -> beta/4, q -> 4q.
  rows.push_back(ledger_row("substitution_beta", effective_beta(c, Jacobian::AsPrinted),
                            effective_beta(c, Jacobian::Strict)));
  rows.push_back(ledger_row("substitution_q",
                            q_used(c, Convention::PaperQ, Jacobian::AsPrinted),
                            q_used(c, Convention::PaperQ, Jacobian::Strict)));
  // Detuning term of the rotating-frame amplitude equation: printed +(m-r) hbar/N,
  // first-principles frame change gives -(m-r) hbar/N.
  rows.push_back(ledger_row("detuning_sign", 1.0, -1.0));
  return rows;
}

SelfcheckResult run_selfcheck(const RunConfig& config, double beta_scale) {
  SelfcheckResult result;
  auto& rows = result.rows;
  spectrum_checks(config, beta_scale, rows);
  coupling_checks(rows);
  mathieu_checks(rows);
  quasienergy_checks(config, beta_scale, rows);
  propagation_checks(rows);
  auto ledger = discrepancy_ledger();
  rows.insert(rows.end(), ledger.begin(), ledger.end());
  return result;
}

namespace {

void write_rows(std::ostream& out, const std::vector<CheckRow>& rows,
                const std::function<std::string(double)>& num) {
  out << "kind,check,value,reference,rel_diff,tolerance,status\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << r.name << ',' << num(r.value) << ','
        << num(r.reference) << ',' << num(r.rel_diff) << ','
        << (r.kind == "oracle" ? num(r.tolerance) : std::string()) << ','
        << r.status << '\n';
  }
}

}  // namespace

void write_selfcheck_csv(std::ostream& out, const SelfcheckResult& result,
                         std::uint64_t config_hash) {
  out << provenance_line(config_hash) << '\n';
  write_rows(out, result.rows, [](double x) { return format_number(x); });
}

void write_ledger(std::ostream& out, const std::vector<CheckRow>& rows,
                  int digits) {
  write_rows(out, rows, [digits](double x) {
    if (!std::isfinite(x)) return format_number(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::string(buf);
  });
}

}  // namespace revival::cli
