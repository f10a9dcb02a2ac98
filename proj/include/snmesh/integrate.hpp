#pragma once

#include <functional>
#include <span>
#include <vector>

namespace snmesh {

struct IntegratorConfig {
  double rtol = 5e-13;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects the step automatically
  long max_steps = 5'000'000;
  int order = 8;  // tag only: the pair is Dormand-Prince 8(5,3)

  void validate() const;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

/// dy/dt = f(t, y), written into the third argument.
using RhsFunction = std::function<void(double, std::span<const double>, std::span<double>)>;

struct IntegrationResult {
  std::vector<double> y;
  IntegrationStats stats;
};

/// Adaptive explicit Runge-Kutta integration from t0 to exactly t1 with the DOP853 pair
/// (eighth order, fifth/third order embedded error estimates) and PI step-size control.
/// Throws IntegrationError on step-size underflow or when max_steps is exceeded.
IntegrationResult integrate(const RhsFunction& f, std::vector<double> y0, double t0, double t1,
                            const IntegratorConfig& cfg = {});

/// One DOP853 step of size h without error control; returns the eighth-order update.
std::vector<double> dop853_step(const RhsFunction& f, std::span<const double> y, double t, double h);

}  // namespace snmesh
