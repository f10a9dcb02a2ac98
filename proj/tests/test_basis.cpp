#include <doctest.h>

#include <cmath>
#include <random>

#include "snmesh/basis.hpp"
#include "snmesh/errors.hpp"
#include "snmesh/quadrature.hpp"

using namespace snmesh;

namespace {

// Gauss-Legendre integral over the cell of f(x).
template <typename F>
double cell_integral(double a, double b, const F& f) {
  const auto& q = gauss_legendre(30);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(0.5 * (a + b) + 0.5 * (b - a) * q.nodes[i]);
  return 0.5 * (b - a) * s;
}

}  // namespace

TEST_CASE("eval_basis examples") {
  const CellBasis unit{2, -1.0, 1.0, 0.0, 0.0};
  CHECK(eval_basis(unit, 0, 0.3) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(eval_basis(unit, 1, 1.0) == doctest::Approx(std::sqrt(1.5)));
  const CellBasis shifted{2, 0.0, 2.0, 0.0, 0.0};
  CHECK(eval_basis(shifted, 2, 1.0) == doctest::Approx(-std::sqrt(5.0) / (2.0 * std::sqrt(2.0))));
  CHECK_THROWS_AS(eval_basis(unit, 0, 1.5), DomainError);
}

TEST_CASE("gradient matrix examples") {
  const double h = 0.7;
  const Matrix L1 = gradient_matrix(CellBasis{1, 0.1, 0.1 + h, 0.0, 0.0});
  CHECK(L1(0, 0) == 0.0);
  CHECK(L1(0, 1) == 0.0);
  CHECK(L1(1, 1) == 0.0);
  CHECK(L1(1, 0) == doctest::Approx(2.0 * std::sqrt(3.0) / h).epsilon(1e-14));
  CHECK(gradient_matrix(CellBasis{0, -1.0, 1.0, 0.0, 0.0})(0, 0) == 0.0);
  CHECK(gradient_matrix(CellBasis{2, -1.0, 1.0, 0.0, 0.0})(2, 1) == doctest::Approx(std::sqrt(15.0)).epsilon(1e-14));
}

TEST_CASE("motion matrix examples") {
  const Matrix G = motion_matrix(CellBasis{1, -1.0, 1.0, -1.0, 1.0});
  CHECK(G(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(std::abs(G(1, 0)) < 1e-15);
  CHECK(G(0, 1) == 0.0);
  CHECK(G(1, 1) == doctest::Approx(-1.5).epsilon(1e-15));

  const Matrix H = motion_matrix(CellBasis{1, 0.0, 1.0, 0.0, 1.0});
  CHECK(H(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(H(1, 0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
  CHECK(H(1, 1) == doctest::Approx(-1.5).epsilon(1e-15));

  const Matrix Z = motion_matrix(CellBasis{6, -0.3, 0.9, 0.0, 0.0});
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) CHECK(Z(i, j) == 0.0);
}

TEST_CASE("edge traces examples") {
  const EdgeTraces a = edge_traces(CellBasis{2, 0.0, 1.0, 0.0, 0.0});
  CHECK(a.left[0] == doctest::Approx(1.0));
  CHECK(a.right[0] == doctest::Approx(1.0));
  CHECK(a.left[1] == doctest::Approx(-std::sqrt(3.0)));
  CHECK(a.right[1] == doctest::Approx(std::sqrt(3.0)));
  const EdgeTraces b = edge_traces(CellBasis{2, -2.0, 2.0, 0.0, 0.0});
  CHECK(b.left[2] == doctest::Approx(std::sqrt(5.0) / 2.0));
  CHECK(b.right[2] == doctest::Approx(std::sqrt(5.0) / 2.0));
}

TEST_CASE("property: orthonormality, integration by parts, quadrature gradient") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> width(1e-3, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int M = trial % 9;
    const double a = pos(rng);
    const CellBasis cell{M, a, a + width(rng), 0.0, 0.0};
    const Matrix L = gradient_matrix(cell);
    const EdgeTraces tr = edge_traces(cell);
    const double h = cell.width();
    for (int i = 0; i <= M; ++i) {
      for (int j = 0; j <= M; ++j) {
        const double mass = cell_integral(cell.x_left, cell.x_right,
                                          [&](double x) { return eval_basis(cell, i, x) * eval_basis(cell, j, x); });
        CHECK(std::abs(mass - (i == j ? 1.0 : 0.0)) < 1e-12);
        // L + L^T = B(1) B(1)^T - B(-1) B(-1)^T
        const double lhs = L(i, j) + L(j, i);
        const double rhs = tr.right[i] * tr.right[j] - tr.left[i] * tr.left[j];
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
        // L_ij = int B_j dB_i/dx dx by quadrature of the Legendre derivative
        const double quad = cell_integral(cell.x_left, cell.x_right, [&](double x) {
          const double z = (2.0 * x - cell.x_left - cell.x_right) / h;
          const double dBi = std::sqrt(2.0 * i + 1.0) / std::sqrt(h) * legendre(i, z).derivative * 2.0 / h;
          return eval_basis(cell, j, x) * dBi;
        });
        CHECK(std::abs(L(i, j) - quad) < 1e-10 * std::max(1.0, std::abs(quad)));
      }
    }
  }
}

TEST_CASE("property: G matches a finite difference of the moving basis") {
  // G_ij = int B_j dB_i/dt dx: compare with a central difference of <B_i(t), B_j(now)> in t
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int M = 1 + trial % 7;
    const double xl = -0.4 - 0.1 * trial;
    const double xr = 0.3 + 0.05 * trial;
    const double vl = speed(rng);
    const double vr = speed(rng) + 1.5;
    const CellBasis now{M, xl, xr, vl, vr};
    const double eps = 1e-5;
    const CellBasis later{M, xl + vl * eps, xr + vr * eps, vl, vr};
    const CellBasis earlier{M, xl - vl * eps, xr - vr * eps, vl, vr};
    const Matrix G = motion_matrix(now);
    for (int i = 0; i <= M; ++i) {
      for (int j = 0; j <= M; ++j) {
        // integrate over the current cell; the shifted bases are polynomials extended past their ends
        auto ext = [&](const CellBasis& c, int n, double x) {
          const double z = (2.0 * x - c.x_left - c.x_right) / c.width();
          return std::sqrt(2.0 * n + 1.0) / std::sqrt(c.width()) * legendre(n, z).value;
        };
        const double a = cell_integral(xl, xr, [&](double x) { return ext(later, i, x) * ext(now, j, x); });
        const double b = cell_integral(xl, xr, [&](double x) { return ext(earlier, i, x) * ext(now, j, x); });
        const double fd = (a - b) / (2.0 * eps);
        CHECK(std::abs(fd - G(i, j)) < 1e-7 * std::max(1.0, std::abs(G(i, j))));
      }
    }
  }
}
