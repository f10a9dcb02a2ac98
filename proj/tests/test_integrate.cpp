#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "snmesh/errors.hpp"
#include "snmesh/integrate.hpp"

using namespace snmesh;

namespace {

double norm(const std::vector<double>& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("exponential decay") {
  const RhsFunction f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  const IntegrationResult r = integrate(f, {1.0}, 0.0, 1.0);
  CHECK(std::abs(r.y[0] - std::exp(-1.0)) < 1e-12);
  CHECK(r.stats.accepted > 0);
}

TEST_CASE("antisymmetric linear flow conserves the norm") {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  const int n = 10;
  std::vector<double> A(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      A[i * n + j] = g(rng);
      A[j * n + i] = -A[i * n + j];
    }
  const RhsFunction f = [&](double, std::span<const double> y, std::span<double> dy) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += A[i * n + j] * y[j];
      dy[i] = s;
    }
  };
  std::vector<double> y0(n);
  for (auto& v : y0) v = g(rng);
  const IntegrationResult r = integrate(f, y0, 0.0, 10.0);
  CHECK(std::abs(norm(r.y) - norm(y0)) < 1e-11);
}

TEST_CASE("harmonic oscillator over ten periods") {
  const RhsFunction f = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const double T = 2.0 * M_PI * 10.0;
  const IntegrationResult r = integrate(f, {1.0, 0.0}, 0.0, T);
  CHECK(std::abs(r.y[0] - 1.0) < 1e-9);
  CHECK(std::abs(r.y[1]) < 1e-9);
}

TEST_CASE("final time is hit exactly and backward-order calls are rejected") {
  const RhsFunction f = [](double t, std::span<const double>, std::span<double> dy) { dy[0] = std::cos(t); };
  const IntegrationResult r = integrate(f, {0.0}, 0.0, 2.5);
  CHECK(std::abs(r.y[0] - std::sin(2.5)) < 1e-12);
  CHECK_THROWS_AS(integrate(f, {0.0}, 1.0, 0.5), InvalidArgument);
  IntegratorConfig bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(integrate(f, {0.0}, 0.0, 1.0, bad), InvalidArgument);
}

TEST_CASE("max steps raises an integration error carrying the last state") {
  const RhsFunction f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  try {
    integrate(f, {1.0}, 0.0, 100.0, cfg);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.last_t() > 0.0);
    CHECK(e.last_t() < 100.0);
    REQUIRE(e.last_y().size() == 1);
    CHECK(std::abs(e.last_y()[0] - std::exp(-e.last_t())) < 1e-10);
  }
}

TEST_CASE("property: one-step error of the eighth-order pair") {
  // Nonlinear test y' = -y^2 + sin(t), reference from many tiny steps.
  const RhsFunction f = [](double t, std::span<const double> y, std::span<double> dy) {
    dy[0] = -y[0] * y[0] + std::sin(t);
    dy[1] = y[0] * y[1];
  };
  const std::vector<double> y0{0.8, 0.3};
  auto reference = [&](double h) {
    std::vector<double> y = y0;
    const int n = 64;
    for (int i = 0; i < n; ++i) y = dop853_step(f, y, i * h / n, h / n);
    return y;
  };
  std::vector<double> errs;
  for (double h : {0.4, 0.2, 0.1}) {
    const std::vector<double> one = dop853_step(f, y0, 0.0, h);
    const std::vector<double> ref = reference(h);
    errs.push_back(std::hypot(one[0] - ref[0], one[1] - ref[1]));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double slope = std::log2(errs[i] / errs[i + 1]);
    CAPTURE(slope);
    CHECK(slope >= 7.0);
  }
}

TEST_CASE("property: tightening rtol by 100 cuts the global error at least tenfold") {
  const RhsFunction f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  IntegratorConfig loose;
  loose.rtol = 1e-6;
  loose.atol = 1e-8;
  IntegratorConfig tight = loose;
  tight.rtol = 1e-8;
  tight.atol = 1e-10;
  const double e1 = std::abs(integrate(f, {1.0}, 0.0, 5.0, loose).y[0] - std::exp(-5.0));
  const double e2 = std::abs(integrate(f, {1.0}, 0.0, 5.0, tight).y[0] - std::exp(-5.0));
  CHECK(e2 * 10.0 <= e1);
}
