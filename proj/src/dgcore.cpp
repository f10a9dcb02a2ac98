#include "snmesh/dgcore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "snmesh/errors.hpp"

namespace snmesh {

std::string_view to_string(SourceMode mode) {
  return mode == SourceMode::uncollided ? "uncollided" : "standard";
}

std::string_view to_string(MeshMode mode) { return mode == MeshMode::moving ? "moving" : "static"; }

SourceMode source_mode_from_string(std::string_view name) {
  if (name == "uncollided") return SourceMode::uncollided;
  if (name == "standard") return SourceMode::standard;
  throw InvalidArgument("unknown source mode '" + std::string(name) + "' (expected uncollided|standard)");
}

MeshMode mesh_mode_from_string(std::string_view name) {
  if (name == "moving") return MeshMode::moving;
  if (name == "static") return MeshMode::static_mesh;
  throw InvalidArgument("unknown mesh mode '" + std::string(name) + "' (expected moving|static)");
}

namespace {

bool is_square(SourceKind kind) {
  return kind == SourceKind::square_pulse || kind == SourceKind::square_source;
}

constexpr double kMaxPanel = 0.25;   // widest smooth panel handed to one Gauss-Legendre rule
constexpr double kGradeRatio = 0.15;  // geometric panels toward an endpoint singularity
constexpr int kGradeLevels = 20;

// Calls visit(x, w) for the nodes of a composite Gauss-Legendre rule on [a, b]. The interval is
// split at the breaks, panels are capped at kMaxPanel, and panels ending on a singular point
// are graded geometrically toward it.
template <typename Visit>
void for_each_node(double a, double b, const std::vector<double>& breaks, const std::vector<double>& singular,
                   const QuadratureSet& rule, const Visit& visit) {
  if (!(b > a)) return;
  const double margin = 1e-14 * std::max(1.0, std::abs(a) + std::abs(b));
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a + margin && p < b - margin) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  auto near_singular = [&](double p) {
    return std::any_of(singular.begin(), singular.end(), [&](double s) { return std::abs(s - p) <= margin; });
  };
  auto panel = [&](double p, double q) {
    const double half = 0.5 * (q - p);
    const double mid = 0.5 * (q + p);
    for (std::size_t n = 0; n < rule.size(); ++n) visit(mid + half * rule.nodes[n], half * rule.weights[n]);
  };
  auto graded = [&](double s, double far) {
    // panels [s + d r^{m+1}, s + d r^m] from the far end down to the singular point
    const double d = far - s;
    double outer = 1.0;
    for (int m = 0; m < kGradeLevels; ++m) {
      const double inner = outer * kGradeRatio;
      const double p = s + d * inner;
      const double q = s + d * outer;
      panel(std::min(p, q), std::max(p, q));
      outer = inner;
    }
    const double q = s + d * outer;
    panel(std::min(s, q), std::max(s, q));
  };

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double p = pts[i];
    const double q = pts[i + 1];
    if (!(q > p)) continue;
    const bool sing_left = near_singular(p);
    const bool sing_right = near_singular(q);
    if (sing_left && sing_right) {
      const double m = 0.5 * (p + q);
      graded(p, m);
      graded(q, m);
    } else if (sing_left) {
      graded(p, q);
    } else if (sing_right) {
      graded(q, p);
    } else {
      const int pieces = std::max(1, static_cast<int>(std::ceil((q - p) / kMaxPanel)));
      const double step = (q - p) / pieces;
      for (int n = 0; n < pieces; ++n) panel(p + n * step, n + 1 == pieces ? q : p + (n + 1) * step);
    }
  }
}

// Initial angular flux (direction independent) of the standard-mode problems.
double initial_profile(const RunConfig& cfg, double x) {
  const SourceSpec& s = cfg.spec;
  switch (s.kind) {
    case SourceKind::plane_pulse: {
      const double half = cfg.mesh == MeshMode::moving ? kPlanePulseHalfWidth : s.x0;
      return std::abs(x) < half ? s.amplitude / (4.0 * half) : 0.0;
    }
    case SourceKind::square_pulse:
      return std::abs(x) < s.x0 ? 0.5 * s.amplitude : 0.0;
    case SourceKind::gaussian_pulse:
      return 0.5 * s.amplitude * std::exp(-x * x / (s.sigma * s.sigma));
    case SourceKind::mms:
      return s.amplitude * mms_solution(x, 0.0, s.x0).psi;
    case SourceKind::square_source:
    case SourceKind::gaussian_source:
      return 0.0;
  }
  return 0.0;
}

std::vector<double> initial_breaks(const RunConfig& cfg) {
  const SourceSpec& s = cfg.spec;
  switch (s.kind) {
    case SourceKind::plane_pulse: {
      const double half = cfg.mesh == MeshMode::moving ? kPlanePulseHalfWidth : s.x0;
      return {-half, half};
    }
    case SourceKind::square_pulse:
    case SourceKind::mms:
      return {-s.x0, s.x0};
    default:
      return {};
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  spec.validate();
  if (angles < 2 || angles % 2 != 0) throw InvalidArgument("N must be an even number >= 2");
  if (order < 0) throw InvalidArgument("M must be >= 0");
  if (cells < 1) throw InvalidArgument("K must be >= 1");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidArgument("t_final must be positive");
  if (!(gaussian_floor > 0.0 && gaussian_floor < 1.0)) throw InvalidArgument("gaussian_floor must lie in (0, 1)");
  integrator.validate();
  if (spec.kind == SourceKind::mms) {
    if (mesh != MeshMode::moving) throw ConfigError("MMS needs the moving mesh (its boundary rides the wavefront)");
    if (mode != SourceMode::standard) throw ConfigError("MMS has no uncollided part; use mode=standard");
  }
  if (mesh == MeshMode::moving && is_square(spec.kind) && (cells < 4 || cells % 4 != 0))
    throw InvalidArgument("the hybrid square mesh needs K to be a multiple of 4");
  if (!(t_final > start_time())) throw InvalidArgument("t_final must exceed the start time");
}

std::string RunConfig::describe() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "kind=%s c=%.17g x0=%.17g t0=%.17g sigma=%.17g amplitude=%.17g N=%d M=%d K=%d mesh=%s "
                "mode=%s t_final=%.17g rtol=%.17g atol=%.17g floor=%.17g",
                std::string(to_string(spec.kind)).c_str(), spec.c, spec.x0, spec.t0, spec.sigma, spec.amplitude,
                angles, order, cells, std::string(to_string(mesh)).c_str(), std::string(to_string(mode)).c_str(),
                t_final, integrator.rtol, integrator.atol, gaussian_floor);
  return buf;
}

MeshLaw RunConfig::mesh_law() const {
  if (mesh == MeshMode::static_mesh) return MeshLaw::static_mesh;
  return is_square(spec.kind) ? MeshLaw::hybrid_square : MeshLaw::radial;
}

std::vector<double> RunConfig::initial_edges() const {
  const bool moving = mesh == MeshMode::moving;
  switch (spec.kind) {
    case SourceKind::plane_pulse:
      if (moving) return uniform_edges(-kPlanePulseHalfWidth, kPlanePulseHalfWidth, cells);
      return source_aligned_edges(spec.x0, t_final + spec.x0, cells);
    case SourceKind::square_pulse:
    case SourceKind::square_source:
      if (moving) return hybrid_square_edges(spec.x0, cells);
      return source_aligned_edges(spec.x0, t_final + spec.x0, cells);
    case SourceKind::gaussian_pulse:
    case SourceKind::gaussian_source: {
      const double w = initial_width_for_gaussian(spec.sigma, gaussian_floor);
      if (moving) return uniform_edges(-w, w, cells);
      return uniform_edges(-t_final - w, t_final + w, cells);
    }
    case SourceKind::mms:
      return uniform_edges(-spec.x0, spec.x0, cells);
  }
  throw ConfigError("unhandled source kind");
}

double RunConfig::start_time() const {
  if (mode == SourceMode::uncollided && spec.kind == SourceKind::plane_pulse) return kDeferredStart;
  if (mesh_law() == MeshLaw::hybrid_square) return kDeferredStart;
  return 0.0;
}

// ---------------------------------------------------------------------------
// TransportSolver

namespace {
const RunConfig& validated(const RunConfig& cfg) {
  cfg.validate();
  return cfg;
}
}  // namespace

TransportSolver::TransportSolver(RunConfig config)
    : config_(validated(config)),
      directions_(&gauss_lobatto(config_.angles)),
      cell_rule_(&gauss_legendre(config_.order + 7)),
      reference_(config_.order),
      mesh_(config_.mesh_law(), config_.initial_edges()),
      t_start_(config_.start_time()) {}

std::size_t TransportSolver::unknowns() const noexcept {
  return static_cast<std::size_t>(config_.angles) * config_.cells * (config_.order + 1);
}

TransportSolver::Frame TransportSolver::frame_at(double t) const {
  const int K = config_.cells;
  const int n = config_.order + 1;
  Frame f;
  f.edges.resize(K + 1);
  f.velocities.resize(K + 1);
  mesh_.evaluate(t, f.edges, f.velocities);
  check_positive_widths(f.edges, t);
  f.inv_sqrt_width.resize(K);
  f.gradient.resize(static_cast<std::size_t>(K) * n * n);
  f.motion.resize(f.gradient.size());
  std::vector<double> g(static_cast<std::size_t>(n) * n), m(g.size());
  for (int k = 0; k < K; ++k) {
    const double h = f.edges[k + 1] - f.edges[k];
    f.inv_sqrt_width[k] = 1.0 / std::sqrt(h);
    const std::size_t off = static_cast<std::size_t>(k) * n * n;
    reference_.cell_matrices(h, f.velocities[k], f.velocities[k + 1], g.data(), m.data());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        f.gradient[off + static_cast<std::size_t>(j) * n + i] = g[static_cast<std::size_t>(i) * n + j];
        f.motion[off + static_cast<std::size_t>(j) * n + i] = m[static_cast<std::size_t>(i) * n + j];
      }
  }
  return f;
}

double TransportSolver::mms_boundary_closure(Side side, double t, double mu) const {
  (void)mu;  // the manufactured solution is isotropic
  if (config_.spec.kind != SourceKind::mms) throw ConfigError("the wavefront closure applies to MMS problems only");
  (void)side;  // symmetric; the indicator is skipped because rounding can put the edge just outside
  const double edge = t + config_.spec.x0;
  return config_.spec.amplitude * std::exp(-0.5 * edge * edge) / (2.0 * (1.0 + t));
}

double TransportSolver::boundary_value(Side side, double t, double mu) const {
  if (config_.spec.kind == SourceKind::mms) return mms_boundary_closure(side, t, mu);
  return 0.0;
}

void TransportSolver::edge_fluxes(const Frame& frame, double t, double mu, const double* u_angle,
                                  double* flux) const {
  // flux[e] = (mu - v_e) * upwind trace at edge e
  const int K = config_.cells;
  const int n = config_.order + 1;
  auto left_trace = [&](int k) {
    const double* c = u_angle + static_cast<std::size_t>(k) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += (j % 2 == 0 ? 1.0 : -1.0) * reference_.root(j) * c[j];
    return s * frame.inv_sqrt_width[k];
  };
  auto right_trace = [&](int k) {
    const double* c = u_angle + static_cast<std::size_t>(k) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += reference_.root(j) * c[j];
    return s * frame.inv_sqrt_width[k];
  };
  for (int e = 0; e <= K; ++e) {
    const double speed = mu - frame.velocities[e];
    double trace = 0.0;
    if (speed > 0.0) {
      trace = e == 0 ? boundary_value(Side::left, t, mu) : right_trace(e - 1);
    } else if (speed < 0.0) {
      trace = e == K ? boundary_value(Side::right, t, mu) : left_trace(e);
    }
    flux[e] = speed * trace;
  }
}

bool TransportSolver::has_driving_source() const noexcept {
  if (config_.mode == SourceMode::uncollided) return config_.spec.kind != SourceKind::mms;
  return !config_.spec.is_pulse();
}

void TransportSolver::driving_source(double x, double t, double& iso, double& lin) const {
  const SourceSpec& s = config_.spec;
  iso = 0.0;
  lin = 0.0;
  if (config_.mode == SourceMode::uncollided) {
    iso = 0.5 * s.c * phi_u(s, x, t);
    return;
  }
  switch (s.kind) {
    case SourceKind::square_source:
      if (t < s.t0 && std::abs(x) < s.x0) iso = 0.5 * s.amplitude;
      break;
    case SourceKind::gaussian_source:
      if (t < s.t0) iso = 0.5 * s.amplitude * std::exp(-x * x / (s.sigma * s.sigma));
      break;
    case SourceKind::mms:
      if (std::abs(x) <= t + s.x0) {
        const double tp1 = t + 1.0;
        const double g = std::exp(-0.5 * x * x);
        iso = -0.5 * s.amplitude * g / (tp1 * tp1);
        lin = -0.5 * s.amplitude * g * x / tp1;
      }
      break;
    default:
      break;
  }
}

std::vector<double> TransportSolver::source_breaks(double t) const {
  const SourceSpec& s = config_.spec;
  if (config_.mode == SourceMode::uncollided) return uncollided_kinks(s, t);
  switch (s.kind) {
    case SourceKind::square_source:
      return {-s.x0, s.x0};
    case SourceKind::mms:
      return {-(t + s.x0), t + s.x0};
    default:
      return {};
  }
}

void TransportSolver::project_source_into(double x_left, double x_right, double t, const std::vector<double>& breaks,
                                          const std::vector<double>& singular, double* iso, double* lin) const {
  const int n = config_.order + 1;
  const double h = x_right - x_left;
  std::vector<double> p(n);
  std::fill(iso, iso + n, 0.0);
  std::fill(lin, lin + n, 0.0);
  for_each_node(x_left, x_right, breaks, singular, *cell_rule_, [&](double x, double w) {
    double a = 0.0;
    double b = 0.0;
    driving_source(x, t, a, b);
    if (a == 0.0 && b == 0.0) return;
    legendre_values((2.0 * x - x_left - x_right) / h, p);
    for (int i = 0; i < n; ++i) {
      iso[i] += w * a * p[i];
      lin[i] += w * b * p[i];
    }
  });
  const double scale = 1.0 / std::sqrt(h);
  for (int i = 0; i < n; ++i) {
    iso[i] *= reference_.root(i) * scale;
    lin[i] *= reference_.root(i) * scale;
  }
}

SourceMoments TransportSolver::project_source(int k, double t) const {
  if (k < 0 || k >= config_.cells) throw InvalidArgument("project_source: cell index out of range");
  const int n = config_.order + 1;
  SourceMoments out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (!has_driving_source()) return out;
  const MeshState m = mesh_.at(t);
  const double xl = m.edges[k];
  const double xr = m.edges[k + 1];
  if (!(xr > xl)) throw MeshError("project_source: zero-width cell");
  const SourceSpec& s = config_.spec;
  if (config_.mode == SourceMode::uncollided && s.kind == SourceKind::plane_pulse &&
      config_.mesh == MeshMode::moving) {
    if (!(t > 0.0)) throw DomainError("plane pulse source is singular at t = 0");
    out.isotropic[0] = 0.5 * s.c * s.amplitude * std::sqrt(xr - xl) * std::exp(-t) / (2.0 * t);
    return out;
  }
  const std::vector<double> breaks = source_breaks(t);
  const std::vector<double> singular =
      config_.mode == SourceMode::uncollided ? uncollided_singular_points(s, t) : std::vector<double>{};
  project_source_into(xl, xr, t, breaks, singular, out.isotropic.data(), out.linear.data());
  return out;
}

SolutionState TransportSolver::initial_state() const {
  const int N = config_.angles;
  const int K = config_.cells;
  const int n = config_.order + 1;
  SolutionState state(N, K, config_.order, t_start_);
  if (config_.mode == SourceMode::uncollided) return state;
  if (!config_.spec.is_pulse() && config_.spec.kind != SourceKind::mms) return state;

  const MeshState m = mesh_.at(t_start_);
  const std::vector<double> breaks = initial_breaks(config_);
  std::vector<double> moments(n);
  std::vector<double> p(n);
  for (int k = 0; k < K; ++k) {
    const double xl = m.edges[k];
    const double xr = m.edges[k + 1];
    const double h = xr - xl;
    std::fill(moments.begin(), moments.end(), 0.0);
    if (h > 0.0) {
      for_each_node(xl, xr, breaks, {}, *cell_rule_, [&](double x, double w) {
        const double v = initial_profile(config_, x);
        if (v == 0.0) return;
        legendre_values((2.0 * x - xl - xr) / h, p);
        for (int i = 0; i < n; ++i) moments[i] += w * v * p[i];
      });
      for (int i = 0; i < n; ++i) moments[i] *= reference_.root(i) / std::sqrt(h);
    }
    for (int l = 0; l < N; ++l)
      for (int j = 0; j < n; ++j) state(l, k, j) = moments[j];
  }
  return state;
}

void TransportSolver::rhs(double t, std::span<const double> u, std::span<double> du) const {
  const int N = config_.angles;
  const int K = config_.cells;
  const int n = config_.order + 1;
  const std::size_t block = static_cast<std::size_t>(K) * n;
  if (u.size() != unknowns() || du.size() != unknowns()) throw InvalidArgument("rhs: state size mismatch");

  const Frame frame = frame_at(t);
  const QuadratureSet& q = *directions_;

  // scattering moments, summed over angles in a fixed order
  std::vector<double> scatter(block, 0.0);
  for (int l = 0; l < N; ++l) {
    const double w = q.weights[l];
    const double* ul = u.data() + l * block;
    for (std::size_t m = 0; m < block; ++m) scatter[m] += w * ul[m];
  }
  const double half_c = 0.5 * config_.spec.c;
  for (double& s : scatter) s *= half_c;

  std::vector<double> iso(block, 0.0);
  std::vector<double> lin(block, 0.0);
  bool any_linear = false;
  if (has_driving_source()) {
    const SourceSpec& s = config_.spec;
    if (config_.mode == SourceMode::uncollided && s.kind == SourceKind::plane_pulse &&
        config_.mesh == MeshMode::moving) {
      const double amp = 0.5 * s.c * s.amplitude * std::exp(-t) / (2.0 * t);
      for (int k = 0; k < K; ++k) iso[static_cast<std::size_t>(k) * n] = amp / frame.inv_sqrt_width[k];
    } else {
      const std::vector<double> breaks = source_breaks(t);
      const std::vector<double> singular =
          config_.mode == SourceMode::uncollided ? uncollided_singular_points(s, t) : std::vector<double>{};
      for (int k = 0; k < K; ++k)
        project_source_into(frame.edges[k], frame.edges[k + 1], t, breaks, singular,
                            iso.data() + static_cast<std::size_t>(k) * n,
                            lin.data() + static_cast<std::size_t>(k) * n);
      any_linear = std::any_of(lin.begin(), lin.end(), [](double v) { return v != 0.0; });
    }
  }

  // edge fluxes for every angle, then per cell (G + mu_l L) applied to all angles at once:
  // coefficients are gathered as T[j][l] so each matrix entry drives one long axpy over l
  std::vector<double> flux(static_cast<std::size_t>(N) * (K + 1));
  for (int l = 0; l < N; ++l) edge_fluxes(frame, t, q.nodes[l], u.data() + l * block, flux.data() + l * (K + 1));

  std::vector<double> T(static_cast<std::size_t>(n) * N);
  std::vector<double> Y(T.size());
  std::vector<double> Z(T.size());
  for (int k = 0; k < K; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    for (int l = 0; l < N; ++l)
      for (int j = 0; j < n; ++j) T[static_cast<std::size_t>(j) * N + l] = u[l * block + off + j];
    const double* G = frame.motion.data() + off * n;    // column-major: G(i, j) = G[j n + i]
    const double* L = frame.gradient.data() + off * n;
    for (int i = 0; i < n; ++i) {
      double* yi = Y.data() + static_cast<std::size_t>(i) * N;
      double* zi = Z.data() + static_cast<std::size_t>(i) * N;
      const double g0 = G[i];
      const double a0 = L[i];
      for (int l = 0; l < N; ++l) {
        yi[l] = g0 * T[l];
        zi[l] = a0 * T[l];
      }
      for (int j = 1; j <= i; ++j) {
        const double g = G[static_cast<std::size_t>(j) * n + i];
        const double a = L[static_cast<std::size_t>(j) * n + i];
        const double* tj = T.data() + static_cast<std::size_t>(j) * N;
        for (int l = 0; l < N; ++l) {
          yi[l] += g * tj[l];
          zi[l] += a * tj[l];
        }
      }
    }
    const double r = frame.inv_sqrt_width[k];
    for (int l = 0; l < N; ++l) {
      const double mu = q.nodes[l];
      const double f_right = flux[static_cast<std::size_t>(l) * (K + 1) + k + 1];
      const double f_left = flux[static_cast<std::size_t>(l) * (K + 1) + k];
      double* dl = du.data() + l * block + off;
      for (int i = 0; i < n; ++i) {
        const std::size_t il = static_cast<std::size_t>(i) * N + l;
        const double b = reference_.root(i) * r;
        const double surf = b * f_right - (i % 2 == 0 ? b : -b) * f_left;
        double value = Y[il] + mu * Z[il] - T[il] - surf + scatter[off + i] + iso[off + i];
        if (any_linear) value += mu * lin[off + i];
        dl[i] = value;
      }
    }
  }
}

SolutionState TransportSolver::rhs(const SolutionState& state) const {
  SolutionState out(state.angles, state.cells, state.order, state.t);
  rhs(state.t, state.u, out.u);
  return out;
}

std::vector<double> TransportSolver::surface_flux(int l, int k, const SolutionState& state) const {
  if (l < 0 || l >= config_.angles || k < 0 || k >= config_.cells)
    throw InvalidArgument("surface_flux: index out of range");
  if (state.u.size() != unknowns()) throw InvalidArgument("surface_flux: state size mismatch");
  const int n = config_.order + 1;
  const Frame frame = frame_at(state.t);
  std::vector<double> flux(config_.cells + 1);
  edge_fluxes(frame, state.t, directions_->nodes[l], state.u.data() + state.index(l, 0, 0), flux.data());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double b = reference_.root(i) * frame.inv_sqrt_width[k];
    out[i] = b * flux[k + 1] - (i % 2 == 0 ? b : -b) * flux[k];
  }
  return out;
}

SolutionState TransportSolver::advance(const SolutionState& state, double t_target, IntegrationStats* stats) const {
  if (state.u.size() != unknowns()) throw InvalidArgument("advance: state size mismatch");
  if (!(t_target >= state.t)) throw InvalidArgument("advance: t_target precedes the state time");
  SolutionState out = state;
  if (t_target == state.t) {
    if (stats) *stats = {};
    return out;
  }
  const RhsFunction f = [this](double t, std::span<const double> y, std::span<double> dy) { rhs(t, y, dy); };
  IntegrationResult r = integrate(f, state.u, state.t, t_target, config_.integrator);
  out.u = std::move(r.y);
  out.t = t_target;
  if (stats) *stats = r.stats;
  return out;
}

SolveResult TransportSolver::solve() const {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  result.state = advance(initial_state(), config_.t_final, &result.stats);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ScalarFlux TransportSolver::scalar_flux(const SolutionState& state, std::span<const double> points) const {
  if (state.u.size() != unknowns()) throw InvalidArgument("scalar_flux: state size mismatch");
  const int N = config_.angles;
  const int K = config_.cells;
  const int n = config_.order + 1;
  const MeshState m = mesh_.at(state.t);
  const double lo = m.edges.front();
  const double hi = m.edges.back();
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  const double edge_tol = 1e-13 * std::max(1.0, hi - lo);

  // angle-integrated coefficients per cell
  std::vector<double> moments(static_cast<std::size_t>(K) * n, 0.0);
  for (int l = 0; l < N; ++l) {
    const double w = directions_->weights[l];
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < n; ++j) moments[static_cast<std::size_t>(k) * n + j] += w * state(l, k, j);
  }

  ScalarFlux out;
  out.x.assign(points.begin(), points.end());
  out.total.resize(points.size());
  out.uncollided.resize(points.size());
  out.collided.resize(points.size());
  std::vector<double> p(n);
  const bool add_uncollided = config_.mode == SourceMode::uncollided;
  const bool has_uncollided = config_.spec.kind != SourceKind::mms;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double x = points[i];
    if (!(x >= lo - slack && x <= hi + slack))
      throw DomainError("scalar_flux: x = " + std::to_string(x) + " lies outside the mesh");
    x = std::clamp(x, lo, hi);
    int k = static_cast<int>(std::lower_bound(m.edges.begin() + 1, m.edges.end(), x) - (m.edges.begin() + 1));
    k = std::clamp(k, 0, K - 1);
    // a point within roundoff of an interior edge counts as on it, so it still goes to the left cell
    if (k > 0 && x - m.edges[k] <= edge_tol) --k;
    const double xl = m.edges[k];
    const double xr = m.edges[k + 1];
    const double h = xr - xl;
    double dg = 0.0;
    if (h > 0.0) {
      legendre_values(std::clamp((2.0 * x - xl - xr) / h, -1.0, 1.0), p);
      for (int j = 0; j < n; ++j) dg += reference_.root(j) * p[j] * moments[static_cast<std::size_t>(k) * n + j];
      dg /= std::sqrt(h);
    }
    double u = 0.0;
    if (has_uncollided && (state.t > 0.0 || config_.spec.kind != SourceKind::plane_pulse))
      u = phi_u(config_.spec, points[i], state.t);
    const double total = add_uncollided ? dg + u : dg;
    out.total[i] = total;
    out.uncollided[i] = has_uncollided ? u : 0.0;
    out.collided[i] = total - out.uncollided[i];
  }
  return out;
}

double TransportSolver::integrated_scalar_flux(const SolutionState& state) const {
  if (state.u.size() != unknowns()) throw InvalidArgument("integrated_scalar_flux: state size mismatch");
  const int K = config_.cells;
  const MeshState m = mesh_.at(state.t);
  double total = 0.0;
  for (int l = 0; l < config_.angles; ++l) {
    const double w = directions_->weights[l];
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      const double h = m.edges[k + 1] - m.edges[k];
      if (h > 0.0) sum += state(l, k, 0) * std::sqrt(h);
    }
    total += w * sum;
  }
  const bool defined = state.t > 0.0 || config_.spec.kind != SourceKind::plane_pulse;
  if (config_.mode == SourceMode::uncollided && defined) {
    const SourceSpec& s = config_.spec;
    const std::vector<double> breaks = uncollided_kinks(s, state.t);
    const std::vector<double> singular = uncollided_singular_points(s, state.t);
    double u = 0.0;
    for_each_node(m.edges.front(), m.edges.back(), breaks, singular, *cell_rule_,
                  [&](double x, double w) { u += w * phi_u(s, x, state.t); });
    total += u;
  }
  return total;
}

}  // namespace snmesh
