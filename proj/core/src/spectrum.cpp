#include "revival/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "revival/errors.hpp"

namespace revival {

namespace {

constexpr double kPi = std::numbers::pi;

void require_level(double n) {
  if (!(n >= 1.0)) {
    throw DomainError("level index must be >= 1, got " + std::to_string(n));
  }
}

}  // namespace

SpectrumModel SpectrumModel::box(double hbar_eff) {
  if (!(hbar_eff > 0.0)) throw DomainError("hbar_eff must be positive");
  return SpectrumModel{Kind::Box, hbar_eff, 1.0, 2.0};
}

SpectrumModel SpectrumModel::power_law(double c, double k, double hbar_eff) {
  if (!(hbar_eff > 0.0)) throw DomainError("hbar_eff must be positive");
  if (!(c > 0.0) || !(k > 0.0)) {
    throw DomainError("power law needs c > 0 and k > 0");
  }
  return SpectrumModel{Kind::PowerLaw, hbar_eff, c, k};
}

double energy(const SpectrumModel& model, double n) {
  require_level(n);
  switch (model.kind) {
    case SpectrumModel::Kind::Box:
      return kPi * kPi * model.hbar_eff * model.hbar_eff * n * n / 2.0;
    case SpectrumModel::Kind::PowerLaw:
      return model.c * std::pow(n, model.k);
  }
  return 0.0;
}

EnergyDerivs energy_derivs(const SpectrumModel& model, double r,
                           int max_order) {
  require_level(r);
  if (max_order < 1 || max_order > 3) {
    throw DomainError("max_order must be 1..3");
  }
  EnergyDerivs out;
  switch (model.kind) {
    case SpectrumModel::Kind::Box: {
      const double curvature = kPi * kPi * model.hbar_eff * model.hbar_eff;
      out.d1 = curvature * r;
      if (max_order >= 2) out.d2 = curvature;
      break;
    }
    case SpectrumModel::Kind::PowerLaw: {
      const double c = model.c;
      const double k = model.k;
      out.d1 = c * k * std::pow(r, k - 1.0);
      if (max_order >= 2) out.d2 = c * k * (k - 1.0) * std::pow(r, k - 2.0);
      if (max_order >= 3) {
        out.d3 = c * k * (k - 1.0) * (k - 2.0) * std::pow(r, k - 3.0);
      }
      break;
    }
  }
  return out;
}

double find_resonant_level(const SpectrumModel& model, int N,
                           double n_max_search) {
  if (N < 1) throw DomainError("resonance order N must be >= 1");
  if (!(n_max_search > 1.0)) throw DomainError("n_max_search must exceed 1");

  auto mismatch = [&](double r) {
    return N * energy_derivs(model, r, 1).d1 - model.hbar_eff;
  };

  double lo = 1.0;
  double hi = n_max_search;
  double f_lo = mismatch(lo);
  const double f_hi = mismatch(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NoResonance("N E'(r) = hbar_eff has no root with r in [1, " +
                      std::to_string(n_max_search) + "]");
  }

  for (int iter = 0; iter < 400 && hi - lo > 1e-12 * 0.5 * (lo + hi);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mismatch(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigen::MatrixXd coupling_matrix(const CouplingModel& coupling, int n_min,
                                int n_max, int N) {
  if (n_min < 1 || n_max <= n_min) {
    throw DomainError("coupling_matrix needs 1 <= n_min < n_max");
  }
  const int size = n_max - n_min + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);

  switch (coupling.mode) {
    case CouplingModel::Mode::ConstantV:
      if (N < 1) throw DomainError("resonance order N must be >= 1");
      for (int i = 0; i + N < size; ++i) {
        m(i, i + N) = coupling.V;
        m(i + N, i) = coupling.V;
      }
      break;
    case CouplingModel::Mode::BoxPosition:
      for (int i = 0; i < size; ++i) {
        m(i, i) = 0.5 * coupling.V;
        const double a = n_min + i;
        for (int j = i + 1; j < size; ++j) {
          const double b = n_min + j;
          if ((i + j + 2 * n_min) % 2 == 0) continue;
          const double diff = a * a - b * b;
          const double x = -8.0 * a * b / (kPi * kPi * diff * diff);
          m(i, j) = coupling.V * x;
          m(j, i) = coupling.V * x;
        }
      }
      break;
  }
  return m;
}

}  // namespace revival
