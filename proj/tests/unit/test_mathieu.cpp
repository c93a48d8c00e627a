#include <cmath>
#include <vector>

#include "doctest.h"
#include "revival/errors.hpp"
#include "revival/mathieu.hpp"
#include "revival/oracle/oracles.hpp"

using namespace revival;
using doctest::Approx;

TEST_CASE("matrix value at q = 0 is nu^2") {
  auto c = char_value_matrix(2.5, 0.0);
  CHECK(c.a == 6.25);
  CHECK(c.err_estimate == 0.0);
  CHECK(c.method == MathieuMethod::Matrix);
}

TEST_CASE("matrix value near the series at small q") {
  const double series = 6.25 + (0.04 / 2.0) / (6.25 - 1.0);
  CHECK(series == Approx(6.25381).epsilon(1e-6));
  CHECK(std::abs(char_value_matrix(2.5, 0.2).a - series) < 1e-4);
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(char_value_matrix(3.0, 0.1), DegenerateOrder);
  CHECK_THROWS_AS(char_value_matrix(-2.0 + 1e-8, 0.1), DegenerateOrder);
  CHECK_THROWS_AS(char_value_matrix(2.5, 0.1, 4), DomainError);
  CHECK_THROWS_AS(char_value_series(1.0 + 1e-9, 0.1), SingularOrder);
  CHECK_THROWS_AS(char_value_series(-1.0, 0.1), SingularOrder);
}

TEST_CASE("series values") {
  CHECK(char_value_series(2.0, 0.0) == 4.0);
  CHECK(char_value_series(2.0, 0.1) == Approx(4.0016667).epsilon(1e-7));
  CHECK(char_value_series(2.0, 0.1) == Approx(4.0 + 0.005 / 3.0).epsilon(1e-15));
}

TEST_CASE("matrix method agrees with a dense eigensolver") {
  for (double nu : {0.2, 0.5, 1.3, 2.5, 3.7, -1.6}) {
    for (double q : {0.01, 0.5, 2.0}) {
      CAPTURE(nu);
      CAPTURE(q);
      auto dense = oracle::dense_mathieu(nu, q, 32);
      CHECK(char_value_matrix(nu, q, 32).a == Approx(dense.a).epsilon(1e-11));
      CHECK(dense.weight_k0 > 0.5);
    }
  }
}

TEST_CASE("series gap scales at least like q^3.5") {
  const std::vector<double> qs{0.05, 0.1, 0.2};
  for (double nu : {1.7, 2.5, 3.3}) {
    std::vector<double> gap;
    for (double q : qs) {
      gap.push_back(std::abs(char_value_converged(nu, q).a - char_value_series(nu, q)));
    }
    CAPTURE(nu);
    CHECK(oracle::loglog_slope(qs, gap) >= 3.5);
  }
}

TEST_CASE("continuation keeps the rank of nu^2 at large q") {
  // Sturm bisection on the same matrix, at the rank nu^2 holds on the
  // diagonal.
  for (double nu : {0.3, 1.3, 2.5, 3.7}) {
    for (double q : {8.0, 40.0}) {
      const int M = 32;
      std::vector<double> diag, off(2 * M, q);
      int rank = 0;
      for (int k = -M; k <= M; ++k) {
        diag.push_back((nu + 2 * k) * (nu + 2 * k));
        if (diag.back() < nu * nu) ++rank;
      }
      CAPTURE(nu);
      CAPTURE(q);
      CHECK(char_value_matrix(nu, q, M).a ==
            Approx(oracle::sturm_eigenvalue(diag, off, rank)).epsilon(1e-12));
    }
  }
}

TEST_CASE("truncation error shrinks as M doubles") {
  for (double nu : {0.7, 2.5}) {
    for (double q : {1.0, 10.0, 40.0}) {
      double prev = char_value_matrix(nu, q, 8).err_estimate;
      for (int M = 16; M <= 128; M *= 2) {
        const double e = char_value_matrix(nu, q, M).err_estimate;
        CAPTURE(nu);
        CAPTURE(q);
        CAPTURE(M);
        // Once both estimates sit at rounding level the order is noise.
        CHECK(e <= std::max(prev, 1e-12 * std::abs(char_value_matrix(nu, q, M).a)));
        prev = e;
      }
    }
  }
}

TEST_CASE("even in q") {
  for (double nu : {0.4, 1.7, 2.5}) {
    for (double q : {0.1, 1.0, 5.0}) {
      CHECK(std::abs(char_value_matrix(nu, q).a - char_value_matrix(nu, -q).a) < 1e-12);
    }
  }
}

TEST_CASE("converged value") {
  auto c = char_value_converged(2.5, 3.0);
  CHECK(c.err_estimate <= 1e-13 * std::abs(c.a));
  CHECK(c.truncation >= 16);
  CHECK(c.a == Approx(oracle::dense_mathieu(2.5, 3.0, 64).a).epsilon(1e-12));
}

TEST_CASE("closed-form derivatives") {
  CHECK(da_dnu(2.5, 0.0, 1, MathieuMethod::Series) == 5.0);
  CHECK(da_dnu(2.5, 0.0, 2, MathieuMethod::Series) == 2.0);
  CHECK(da_dnu(2.5, 0.0, 3, MathieuMethod::Series) == 0.0);
  CHECK(std::abs(da_dnu(2.5, 0.2, 2, MathieuMethod::Series) -
                 da_dnu(2.5, 0.2, 2, MathieuMethod::Matrix)) < 1e-3);
  CHECK_THROWS_AS(da_dnu(2.5, 0.1, 4, MathieuMethod::Series), DomainError);
}

TEST_CASE("series derivatives match differences of the series") {
  // Differencing a(nu, q) - a(nu, 0) keeps the large nu^2 part out of the
  // rounding budget; its derivatives are those of a(nu, q) minus the exact
  // q = 0 closed forms.
  for (double nu : {1.7, 2.5, 3.3, 0.4}) {
    for (double q : {0.05, 0.2}) {
      oracle::Fn a = [&](double x) {
        return char_value_series(x, q) - char_value_series(x, 0.0);
      };
      const double pole_gap = std::abs(std::abs(nu) - 1.0);
      for (int order = 1; order <= 3; ++order) {
        auto est = oracle::ridders(a, nu, (order == 3 ? 0.3 : 0.2) * pole_gap, order);
        const double closed = da_dnu(nu, q, order, MathieuMethod::Series) -
                              da_dnu(nu, 0.0, order, MathieuMethod::Series);
        CAPTURE(nu);
        CAPTURE(q);
        CAPTURE(order);
        // At q = 0.05 the third derivative is ~1e-5 of a itself and the
        // differences bottom out near 1e-7.
        const double tol = (order == 3 && q < 0.1) ? 2e-7 : 1e-8;
        CHECK(std::abs(est.value - closed) <= tol * std::abs(closed));
      }
    }
  }
}

TEST_CASE("matrix derivatives follow the series at small q") {
  for (int order = 1; order <= 2; ++order) {
    CHECK(da_dnu(3.3, 0.05, order, MathieuMethod::Matrix) ==
          Approx(da_dnu(3.3, 0.05, order, MathieuMethod::Series)).epsilon(1e-5));
  }
}
