#pragma once

#include <cmath>
#include <string_view>
#include <vector>

namespace snmesh {

enum class SourceKind {
  plane_pulse,
  square_pulse,
  square_source,
  gaussian_pulse,
  gaussian_source,
  mms,
};

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

/// Physical description of a test source. Lengths in mean free paths, times in mean free times.
struct SourceSpec {
  SourceKind kind = SourceKind::square_pulse;
  double c = 1.0;          // scattering ratio
  double x0 = 0.5;         // half-width (pulse/square kinds, MMS wavefront offset)
  double t0 = 5.0;         // source duration (source kinds)
  double sigma = 0.5;      // Gaussian width
  double amplitude = 1.0;  // multiplies the source; 1 reproduces the standard problem

  void validate() const;
  bool is_pulse() const noexcept;
};

// Special functions.

/// Principal-value exponential integral Ei(y). Throws DomainError at y = 0.
double exp_integral_ei(double y);

/// erf(a) - erf(b), evaluated through erfc when both arguments sit in the same tail.
double erf_difference(double a, double b);

// Uncollided scalar fluxes, unit amplitude.

/// exp(-t) / (2t) inside the light cone |x| < t. Throws DomainError for t <= 0.
double phi_u_plane(double x, double t);

/// Piecewise-linear uncollided flux of a square pulse of half-width x0.
double phi_u_square_pulse(double x, double t, double x0);

/// Uncollided flux of a Gaussian pulse exp(-x^2/sigma^2); returns the initial profile for t < 1e-12.
double phi_u_gaussian_pulse(double x, double t, double sigma);

/// Time convolution of the Gaussian pulse kernel over [0, min(t, t0)], adaptive Gauss-Kronrod.
double phi_u_gaussian_source(double x, double t, double sigma, double t0);

/// Closed form for a square source on for t0, in terms of Ei.
double phi_u_square_source(double x, double t, double x0, double t0);

/// Dispatches on the spec kind and includes its amplitude. MMS has no uncollided part (returns 0).
double phi_u(const SourceSpec& spec, double x, double t);

// Manufactured solution.

struct MmsValue {
  double psi;  // angular flux (direction independent)
  double phi;  // scalar flux, 2 psi
};

/// exp(-x^2/2) / (2(1+t)) inside |x| <= t + x0, zero outside.
MmsValue mms_solution(double x, double t, double x0);

/// Source that produces mms_solution for c = 1, on the same support.
double mms_source(double x, double t, double mu, double x0);

// Scaling between scattering ratios for source-free problems.

struct ScaledParameters {
  double x0;
  double sigma;
  double t;
};

/// Parameters of the c-problem that maps onto a c = 1 problem with (x0, sigma) evaluated at t.
ScaledParameters scale_parameters(double c, double x0, double sigma, double t);

/// psi^c(x, mu, t) = c exp(-(1-c) t) psi^1(c x, mu, c t).
template <typename Psi1>
double scale_solution(const Psi1& psi1, double c, double x, double mu, double t) {
  return c * std::exp(-(1.0 - c) * t) * psi1(c * x, mu, c * t);
}

/// Abscissas in x where the uncollided flux (or the MMS support) has a kink or jump at time t.
std::vector<double> uncollided_kinks(const SourceSpec& spec, double t);

/// Abscissas where the uncollided flux has an x log x type endpoint singularity.
std::vector<double> uncollided_singular_points(const SourceSpec& spec, double t);

}  // namespace snmesh
