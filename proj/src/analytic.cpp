#include "snmesh/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include "snmesh/errors.hpp"

namespace snmesh {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::plane_pulse:
      return "plane-pulse";
    case SourceKind::square_pulse:
      return "square-pulse";
    case SourceKind::square_source:
      return "square-source";
    case SourceKind::gaussian_pulse:
      return "gaussian-pulse";
    case SourceKind::gaussian_source:
      return "gaussian-source";
    case SourceKind::mms:
      return "mms";
  }
  return "unknown";
}

SourceKind source_kind_from_string(std::string_view name) {
  for (auto kind : {SourceKind::plane_pulse, SourceKind::square_pulse, SourceKind::square_source,
                    SourceKind::gaussian_pulse, SourceKind::gaussian_source, SourceKind::mms}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown source kind '" + std::string(name) + "'");
}

void SourceSpec::validate() const {
  if (!(c > 0.0)) throw InvalidArgument("scattering ratio c must be positive");
  if (!(x0 >= 0.0)) throw InvalidArgument("x0 must be non-negative");
  switch (kind) {
    case SourceKind::square_pulse:
    case SourceKind::square_source:
    case SourceKind::mms:
      if (!(x0 > 0.0)) throw InvalidArgument("x0 must be positive for " + std::string(to_string(kind)));
      break;
    case SourceKind::gaussian_pulse:
    case SourceKind::gaussian_source:
      if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
      break;
    case SourceKind::plane_pulse:
      break;
  }
  if (kind == SourceKind::square_source || kind == SourceKind::gaussian_source) {
    if (!(t0 > 0.0)) throw InvalidArgument("t0 must be positive for source problems");
  }
}

bool SourceSpec::is_pulse() const noexcept {
  return kind == SourceKind::plane_pulse || kind == SourceKind::square_pulse || kind == SourceKind::gaussian_pulse;
}

// ---------------------------------------------------------------------------
// Special functions

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// gamma + ln|y| + sum y^k / (k k!)
double ei_series(double y) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= y / k;
    const double contribution = term / k;
    sum += contribution;
    if (std::abs(contribution) <= kEps * std::abs(sum)) break;
  }
  return kEulerGamma + std::log(std::abs(y)) + sum;
}

// E1(x) for x > 1 by the modified Lentz continued fraction.
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h * std::exp(-x);
}

// e^y / y sum k! / y^k, truncated at the smallest term.
double ei_asymptotic(double y) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double next = term * k / y;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return std::exp(y) / y * sum;
}

}  // namespace

double exp_integral_ei(double y) {
  if (y == 0.0) throw DomainError("exp_integral_ei: Ei is singular at 0");
  if (std::isnan(y)) return y;
  if (y < -1.0) return -e1_continued_fraction(-y);
  if (y <= 40.0) return ei_series(y);
  return ei_asymptotic(y);
}

double erf_difference(double a, double b) {
  if (a > 0.5 && b > 0.5) return std::erfc(b) - std::erfc(a);
  if (a < -0.5 && b < -0.5) return std::erfc(-a) - std::erfc(-b);
  return std::erf(a) - std::erf(b);
}

// ---------------------------------------------------------------------------
// Uncollided fluxes

double phi_u_plane(double x, double t) {
  if (!(t > 0.0)) throw DomainError("phi_u_plane: requires t > 0");
  return std::abs(x) < t ? std::exp(-t) / (2.0 * t) : 0.0;
}

double phi_u_square_pulse(double x, double t, double x0) {
  const double ax = std::abs(x);
  if (t <= 0.0) {
    if (ax < x0) return 1.0;
    return ax == x0 ? 0.5 : 0.0;
  }
  if (ax - t >= x0) return 0.0;
  const double decay = std::exp(-t);
  if (t > x0 && ax <= t - x0) return x0 * decay / t;
  if (t <= x0 && ax <= x0 - t) return decay;
  return decay * (t - ax + x0) / (2.0 * t);
}

double phi_u_gaussian_pulse(double x, double t, double sigma) {
  const double u = x / sigma;
  if (t < 1e-12) return std::exp(-u * u);
  const double eps = t / sigma;
  if (eps < 1e-5) {
    // Symmetric-difference expansion of the erf pair about u.
    return std::exp(-t - u * u) * (1.0 + eps * eps * (2.0 * u * u - 1.0) / 3.0);
  }
  const double pair = erf_difference((t + x) / sigma, (x - t) / sigma);
  return sigma * std::sqrt(std::numbers::pi) * std::exp(-t) * pair / (4.0 * t);
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel kronrod_panel(const F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double phi_u_gaussian_source(double x, double t, double sigma, double t0) {
  if (t <= 0.0) return 0.0;
  // Integrate over the elapsed time s = t - tau in [t - min(t, t0), t].
  const double s_low = t - std::min(t, t0);
  const auto integrand = [&](double s) { return phi_u_gaussian_pulse(x, s, sigma); };
  constexpr double abs_tol = 1e-12;
  constexpr int max_panels = 4000;

  std::priority_queue<Panel> panels;
  Panel first = kronrod_panel(integrand, s_low, t);
  double total = first.value;
  double error = first.error;
  panels.push(first);
  int count = 1;
  while (error > abs_tol) {
    if (count >= max_panels) {
      std::ostringstream msg;
      msg << "phi_u_gaussian_source: quadrature did not converge at x=" << x << ", t=" << t
          << " (estimate " << total << ", error " << error << ")";
      throw NumericalError(msg.str());
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod_panel(integrand, worst.a, mid);
    const Panel right = kronrod_panel(integrand, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  return total;
}

double phi_u_square_source(double x, double t, double x0, double t0) {
  if (t <= 0.0) return 0.0;
  const auto positive = [](double v) { return v > 0.0 ? v : 0.0; };
  const double ax = std::abs(x);
  const double d = positive(std::min({t0, t, t - ax + x0}));
  if (d <= 0.0) return 0.0;
  const double b = positive(std::min(d, t - ax - x0));
  const double c = positive(std::min(d, t + ax - x0));

  double result = 0.0;
  // Pulses old enough that x sits on their plateau.
  if (b > 0.0) result += -x0 * (exp_integral_ei(b - t) - exp_integral_ei(-t));
  // Pulses whose ramp covers x.
  if (c > b) {
    double ramp = std::exp(c - t) - std::exp(b - t);
    const double slope = ax - x0;
    // slope * Ei(c - t) -> 0 as |x| -> x0 (there c - t = -slope); skip it when rounding lands on Ei(0)
    if (slope != 0.0) {
      if (c != t) ramp += slope * exp_integral_ei(c - t);
      if (b != t) ramp -= slope * exp_integral_ei(b - t);
    }
    result += 0.5 * ramp;
  }
  // Pulses young enough that x is still inside their flat top.
  if (d > c) result += std::exp(d - t) - std::exp(c - t);
  return result;
}

double phi_u(const SourceSpec& spec, double x, double t) {
  double value = 0.0;
  switch (spec.kind) {
    case SourceKind::plane_pulse:
      value = phi_u_plane(x, t);
      break;
    case SourceKind::square_pulse:
      value = phi_u_square_pulse(x, t, spec.x0);
      break;
    case SourceKind::square_source:
      value = phi_u_square_source(x, t, spec.x0, spec.t0);
      break;
    case SourceKind::gaussian_pulse:
      value = phi_u_gaussian_pulse(x, t, spec.sigma);
      break;
    case SourceKind::gaussian_source:
      value = phi_u_gaussian_source(x, t, spec.sigma, spec.t0);
      break;
    case SourceKind::mms:
      return 0.0;
  }
  return spec.amplitude * value;
}

// ---------------------------------------------------------------------------
// Manufactured solution

MmsValue mms_solution(double x, double t, double x0) {
  if (std::abs(x) > t + x0) return {0.0, 0.0};
  const double psi = std::exp(-0.5 * x * x) / (2.0 * (1.0 + t));
  return {psi, 2.0 * psi};
}

double mms_source(double x, double t, double mu, double x0) {
  if (std::abs(x) > t + x0) return 0.0;
  const double tp1 = t + 1.0;
  return -std::exp(-0.5 * x * x) * (mu * tp1 * x + 1.0) / (tp1 * tp1);
}

ScaledParameters scale_parameters(double c, double x0, double sigma, double t) {
  if (!(c > 0.0)) throw InvalidArgument("scale_parameters: c must be positive");
  return {x0 / c, sigma / c, t / c};
}

// ---------------------------------------------------------------------------
// Kink locations

std::vector<double> uncollided_kinks(const SourceSpec& spec, double t) {
  std::vector<double> magnitudes;
  const double x0 = spec.x0;
  switch (spec.kind) {
    case SourceKind::plane_pulse:
      magnitudes = {t};
      break;
    case SourceKind::square_pulse:
      magnitudes = {x0, std::abs(t - x0), t + x0};
      break;
    case SourceKind::square_source: {
      const double t0 = spec.t0;
      magnitudes = {0.0, x0, std::abs(t - x0), t + x0, std::abs(t - t0 + x0), std::abs(t - t0 - x0)};
      break;
    }
    case SourceKind::mms:
      magnitudes = {t + x0};
      break;
    case SourceKind::gaussian_pulse:
    case SourceKind::gaussian_source:
      break;
  }
  std::vector<double> points;
  for (double m : magnitudes) {
    points.push_back(m);
    if (m != 0.0) points.push_back(-m);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

std::vector<double> uncollided_singular_points(const SourceSpec& spec, double t) {
  if (spec.kind == SourceKind::square_source && t < spec.t0) return {-spec.x0, spec.x0};
  return {};
}

}  // namespace snmesh
