#include "revival/oracle/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace revival::oracle {

double central_difference(const Fn& f, double x, double h, int order) {
  const double fm2 = f(x - 2.0 * h);
  const double fm1 = f(x - h);
  const double fp1 = f(x + h);
  const double fp2 = f(x + 2.0 * h);
  switch (order) {
    case 1:
      return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
    case 2:
      return (-fp2 + 16.0 * fp1 - 30.0 * f(x) + 16.0 * fm1 - fm2) / (12.0 * h * h);
    case 3:
      return (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    default:
      throw std::invalid_argument("central_difference: order must be 1..3");
  }
}

Estimate ridders(const Fn& f, double x, double h0, int order) {
  constexpr int kTab = 12;
  constexpr double kShrink = 1.4;
  constexpr double kShrink2 = kShrink * kShrink;

  double table[kTab][kTab];
  double h = h0;
  Estimate best{central_difference(f, x, h, order),
                std::numeric_limits<double>::max()};
  table[0][0] = best.value;
  for (int i = 1; i < kTab; ++i) {
    h /= kShrink;
    table[0][i] = central_difference(f, x, h, order);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
      fac *= kShrink2;
      const double err = std::max(std::abs(table[j][i] - table[j - 1][i]),
                                  std::abs(table[j][i] - table[j - 1][i - 1]));
      if (err <= best.error) {
        best = {table[j][i], err};
      }
    }
    if (std::abs(table[i][i] - table[i - 1][i - 1]) >= 2.0 * best.error) break;
  }
  return best;
}

double box_position_quadrature(int m, int n) {
  constexpr double kPi = std::numbers::pi;
  auto integrand = [m, n](double x) {
    return 2.0 * std::sin(m * kPi * x) * x * std::sin(n * kPi * x);
  };
  // Split at the nodes of the faster oscillation so each panel is smooth.
  const int panels = 4 * std::max(m, n);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double b = static_cast<double>(p + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, a, b, 8, 1e-14);
  }
  return total;
}

double sturm_eigenvalue(std::span<const double> diag,
                        std::span<const double> off, int k) {
  const int n = static_cast<int>(diag.size());
  // Number of eigenvalues strictly below x (LDL^T pivots).
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
      const double e2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
      d = diag[i] - x - (i > 0 ? e2 / d : 0.0);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  };
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
                          (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DenseMathieu dense_mathieu(double nu, double q, int M) {
  const int size = 2 * M + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (int k = -M; k <= M; ++k) {
    const double x = nu + 2.0 * k;
    m(k + M, k + M) = x * x;
    if (k < M) {
      m(k + M, k + M + 1) = q;
      m(k + M + 1, k + M) = q;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  int best = 0;
  double weight = -1.0;
  for (int j = 0; j < size; ++j) {
    const double w = eig.eigenvectors()(M, j) * eig.eigenvectors()(M, j);
    if (w > weight) {
      weight = w;
      best = j;
    }
  }
  return {eig.eigenvalues()[best], weight};
}

std::complex<double> phase_sum(std::span<const double> weights,
                               std::span<const double> energies, double t,
                               double hbar) {
  long double re = 0.0L;
  long double im = 0.0L;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const long double phase =
        -static_cast<long double>(energies[n]) * t / hbar;
    re += weights[n] * std::cos(phase);
    im += weights[n] * std::sin(phase);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

std::vector<double> gaussian_populations(double center, double delta_n,
                                         int n_min, int n_max) {
  std::vector<double> p;
  long double total = 0.0L;
  for (int n = n_min; n <= n_max; ++n) {
    const long double x = (n - center) / delta_n;
    const long double w = std::exp(-0.5L * x * x);
    p.push_back(static_cast<double>(w));
    total += w;
  }
  for (auto& v : p) v = static_cast<double>(v / total);
  return p;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace revival::oracle
