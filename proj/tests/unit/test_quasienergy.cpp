#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "revival/errors.hpp"
#include "revival/mathieu.hpp"
#include "revival/oracle/oracles.hpp"
#include "revival/quasienergy.hpp"

using namespace revival;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

CanonicalCoeffs coeffs(double beta, double q) {
  CanonicalCoeffs c;
  c.beta = beta;
  c.q_paper = q;
  c.q_std = -q / 2.0;
  return c;
}

TimeScaleQuery query(double nu, ReportModes modes) {
  TimeScaleQuery qy;
  qy.nu_r = nu;
  qy.modes = modes;
  return qy;
}

}  // namespace

TEST_CASE("coefficients at an exact box resonance") {
  const auto box = SpectrumModel::box(0.01);
  ResonanceParams p;
  p.hbar_eff = 0.01;
  p.r = find_resonant_level(box, 1);
  auto c = canonical_coeffs(box, p);
  CHECK(c.alpha_mag == 0.0);
  CHECK(std::abs(c.gamma_mag) < 1e-14);
  CHECK(c.omega_sq < 1e-20);
  CHECK(c.beta == Approx(kPi * kPi * 1e-4 / 4.0).epsilon(1e-14));
  CHECK(c.beta == Approx(2.4674e-4).epsilon(1e-4));
  CHECK(c.a_offset < 1e-20);
}

TEST_CASE("power-law coefficients") {
  const auto cube12 = SpectrumModel::power_law(1.0, 3.0, 12.0);
  ResonanceParams p;
  p.r = 2.0;
  p.hbar_eff = 12.0;
  p.lambda = 0.3;
  p.V = 1.0;
  auto c = canonical_coeffs(cube12, p);
  CHECK(c.gamma_mag == Approx(0.0));
  CHECK(c.alpha_mag == Approx(1.0));
  CHECK(c.beta == Approx(3.0));
  CHECK(c.q_paper == Approx(0.1));
  CHECK(c.q_std == Approx(-0.05));

  // hbar = 11: gamma = 1, omega^2 = 1/36, a_offset = (1/36 + 1)^2 / 36.
  p.hbar_eff = 11.0;
  auto d = canonical_coeffs(SpectrumModel::power_law(1.0, 3.0, 11.0), p);
  CHECK(d.gamma_mag == Approx(1.0));
  CHECK(d.omega_sq == Approx(1.0 / 36.0));
  CHECK(d.a_offset == Approx(1369.0 / 46656.0).epsilon(1e-14));
  CHECK(d.a_offset == Approx(0.0293424).epsilon(1e-6));
}

TEST_CASE("flat spectrum is rejected") {
  ResonanceParams p;
  p.r = 3.0;
  CHECK_THROWS_AS(canonical_coeffs(SpectrumModel::power_law(1.0, 1.0, 1.0), p),
                  FlatSpectrum);
}

TEST_CASE("a_offset is never negative") {
  for (double k : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (double r : {2.0, 5.0, 17.0}) {
      for (double hbar : {0.1, 1.0, 10.0}) {
        ResonanceParams p;
        p.r = r;
        p.hbar_eff = hbar;
        auto c = canonical_coeffs(SpectrumModel::power_law(1.0, k, hbar), p);
        CHECK(c.a_offset >= 0.0);
      }
    }
  }
}

TEST_CASE("level to Floquet exponent") {
  ResonanceParams p;
  p.r = 10.0;
  p.N = 1;
  CHECK(nu_of_n(10.0, p) == 0.0);
  CHECK(nu_of_n(11.0, p) == 2.0);
  p.N = 2;
  CHECK(nu_of_n(12.0, p) == 2.0);
  CHECK(nu_of_n(15.0, p) == 5.0);
}

TEST_CASE("quasi-energy values") {
  CHECK(quasi_energy(2.0, coeffs(3.0, 0.0)) == 12.0);
  CHECK(quasi_energy(2.0, coeffs(3.0, 0.1)) == Approx(12.005).epsilon(1e-14));

  QuasiEnergyOptions matrix;
  matrix.source = QuasiEnergySource::MatrixFloquet;
  const double beta = 3.0;
  CHECK(std::abs(quasi_energy(2.5, coeffs(beta, 0.1), matrix) -
                 quasi_energy(2.5, coeffs(beta, 0.1))) < 3e-5 * beta);

  auto with_offset = coeffs(beta, 0.1);
  with_offset.a_offset = 0.5;
  CHECK(quasi_energy(2.5, with_offset, matrix) ==
        Approx(quasi_energy(2.5, coeffs(beta, 0.1), matrix) + beta * 0.5));
}

TEST_CASE("conventions and the strict jacobian") {
  auto c = coeffs(2.0, 0.1);
  CHECK(q_used(c, Convention::PaperQ) == 0.1);
  CHECK(q_used(c, Convention::StandardQ) == -0.05);
  CHECK(q_used(c, Convention::PaperQ, Jacobian::Strict) == Approx(0.4));
  CHECK(effective_beta(c, Jacobian::AsPrinted) == 2.0);
  CHECK(effective_beta(c, Jacobian::Strict) == 0.5);
  QuasiEnergyOptions strict;
  strict.jacobian = Jacobian::Strict;
  CHECK(quasi_energy(2.5, c, strict) ==
        Approx(0.5 * char_value_series(2.5, 0.4)).epsilon(1e-14));
}

TEST_CASE("definition mode at q = 0") {
  auto rep = time_scales(coeffs(3.0, 0.0), query(2.0, ReportModes::Definition));
  CHECK(rep.eps_derivs[0] == Approx(24.0));
  CHECK(rep.definition->T_cl == Approx(2.0 * kPi / 24.0));
  CHECK(rep.definition->T_cl == Approx(0.2618).epsilon(1e-4));
  CHECK(std::isinf(rep.definition->T_sr));
  CHECK_FALSE(rep.paper.has_value());
  CHECK_FALSE(rep.discrepancy.has_value());
}

TEST_CASE("paper mode super-revival") {
  auto rep = time_scales(coeffs(3.0, 0.1), query(2.0, ReportModes::Paper));
  const double T0 = 2.0 * kPi / 3.0;
  CHECK(rep.paper->T_sr == Approx(6.0 * T0 * 0.005 * 144.0 / 81.0).epsilon(1e-14));
  CHECK(rep.paper->T_sr == Approx(0.11170).epsilon(1e-4));
  CHECK_FALSE(rep.definition.has_value());

  auto zero_q = time_scales(coeffs(3.0, 0.0), query(2.0, ReportModes::Paper));
  CHECK(std::isinf(zero_q.paper->T_sr));
}

TEST_CASE("both modes carry a discrepancy block") {
  auto rep = time_scales(coeffs(1.0, 0.1), query(2.5, ReportModes::Both));
  REQUIRE(rep.discrepancy.has_value());
  CHECK(rep.discrepancy->jacobian_factor == 2.0);
  CHECK(rep.discrepancy->T_cl > 0.0);
  CHECK(rep.discrepancy->T_rev > 0.0);
  CHECK(rep.discrepancy->T_sr > 0.0);
  REQUIRE(rep.T_cl_lab.has_value());
}

TEST_CASE("non-resonant restriction") {
  CHECK_THROWS_AS(time_scales(coeffs(1.0, 0.1), query(1.0, ReportModes::Both)),
                  SingularOrder);
  CHECK_THROWS_AS(time_scales(coeffs(1.0, 0.1), query(-1.0, ReportModes::Both)),
                  SingularOrder);
}

TEST_CASE("closed-form n-derivatives match differences of the quasi-energy") {
  struct Case {
    double beta, q, nu;
    int N;
  };
  const Case cases[] = {{1.0, 0.1, 2.5, 1}, {3.0, 0.05, 1.7, 2},
                        {0.2, 0.2, -2.3, 1}, {2.0, 0.1, 3.3, 3}};
  for (const auto& cs : cases) {
    auto c = coeffs(cs.beta, cs.q);
    ResonanceParams p;
    p.N = cs.N;
    p.r = 20.0;
    const double n0 = p.r + cs.nu * cs.N / 2.0;
    auto d = quasi_energy_derivs(c, cs.nu, cs.N, Convention::PaperQ, Jacobian::AsPrinted);
    oracle::Fn eps = [&](double n) { return quasi_energy(nu_of_n(n, p), c); };
    // Stay clear of the poles at nu = +-1.
    const double gap = (std::abs(cs.nu) - 1.0) * cs.N / 2.0;
    for (int j = 1; j <= 3; ++j) {
      const double h0 = j == 3 ? 0.3 * gap : 0.05;
      auto est = oracle::ridders(eps, n0, h0, j);
      CAPTURE(cs.nu);
      CAPTURE(j);
      CHECK(std::abs(est.value - d[j - 1]) <= 1e-6 * std::abs(d[j - 1]));
    }
  }
}

TEST_CASE("super-revival time scales as q^-2") {
  std::vector<double> qs, tsr;
  for (int i = 0; i <= 10; ++i) {
    const double q = 0.02 * std::pow(10.0, i / 10.0);
    qs.push_back(q);
    tsr.push_back(time_scales(coeffs(1.0, q), query(2.5, ReportModes::Definition))
                      .definition->T_sr);
  }
  CHECK(std::abs(oracle::loglog_slope(qs, tsr) + 2.0) <= 0.1);
}

TEST_CASE("paper and definition classical periods differ by O(q^2)") {
  // The ratio is q-independent at leading order; its q-dependent part must
  // vanish like q^2.
  auto rd = [](double q) {
    return time_scales(coeffs(1.0, q), query(2.5, ReportModes::Both)).discrepancy->T_cl;
  };
  const double base = rd(0.0);
  std::vector<double> qs{0.02, 0.04, 0.08, 0.16}, excess;
  for (double q : qs) excess.push_back(std::abs(rd(q) - base));
  CHECK(std::abs(oracle::loglog_slope(qs, excess) - 2.0) <= 0.1);
}

TEST_CASE("time scales are even in lambda") {
  const auto model = SpectrumModel::power_law(1.0, 3.0, 11.0);
  ResonanceParams p;
  p.r = 2.0;
  p.hbar_eff = 11.0;
  p.lambda = 0.2;
  auto plus = time_scales(model, p, 3.3);
  p.lambda = -0.2;
  auto minus = time_scales(model, p, 3.3);
  CHECK(plus.definition->T_cl == minus.definition->T_cl);
  CHECK(plus.definition->T_rev == minus.definition->T_rev);
  CHECK(plus.definition->T_sr == minus.definition->T_sr);
  CHECK(plus.paper->T_cl == minus.paper->T_cl);
  CHECK(plus.paper->T_rev == minus.paper->T_rev);
  CHECK(plus.paper->T_sr == minus.paper->T_sr);
}

TEST_CASE("large lambda is flagged") {
  auto qy = query(2.5, ReportModes::Both);
  qy.lambda = 0.6;
  CHECK(time_scales(coeffs(1.0, 0.1), qy).large_lambda_warning);
  qy.lambda = 0.1;
  CHECK_FALSE(time_scales(coeffs(1.0, 0.1), qy).large_lambda_warning);
}

TEST_CASE("convention labels") {
  CHECK(std::string(to_string(Convention::PaperQ)) == "paperq");
  CHECK(std::string(to_string(Convention::StandardQ)) == "stdq");
  CHECK(std::string(to_string(Jacobian::Strict)) == "strict");
}
