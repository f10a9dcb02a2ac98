#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snmesh/analytic.hpp"
#include "snmesh/basis.hpp"
#include "snmesh/integrate.hpp"
#include "snmesh/mesh.hpp"
#include "snmesh/quadrature.hpp"

namespace snmesh {

enum class SourceMode {
  uncollided,  // solve for the collided flux driven by (c/2) phi_u; add phi_u back at the end
  standard,    // solve the full problem with the source (or pulse initial condition) directly
};

enum class MeshMode {
  static_mesh,
  moving,  // radial law, or the hybrid law for square sources
};

std::string_view to_string(SourceMode mode);
std::string_view to_string(MeshMode mode);
SourceMode source_mode_from_string(std::string_view name);
MeshMode mesh_mode_from_string(std::string_view name);

/// Half-width used for the plane pulse when a finite width is needed (moving mesh start).
inline constexpr double kPlanePulseHalfWidth = 1e-10;
/// Start time for problems whose source is singular at t = 0 or whose mesh starts with
/// zero-width cells.
inline constexpr double kDeferredStart = 1e-10;

struct RunConfig {
  SourceSpec spec;
  int angles = 64;  // N, Gauss-Lobatto directions
  int order = 6;    // M, highest basis degree
  int cells = 8;    // K
  MeshMode mesh = MeshMode::moving;
  SourceMode mode = SourceMode::uncollided;
  double t_final = 1.0;
  IntegratorConfig integrator;
  double gaussian_floor = 1e-16;  // Gaussian initial width: exp(-x^2/sigma^2) below this value

  /// Throws ConfigError / InvalidArgument for combinations the solver cannot run.
  void validate() const;

  /// Canonical one-line key=value echo, stable across runs (used for fingerprints).
  std::string describe() const;

  MeshLaw mesh_law() const;
  std::vector<double> initial_edges() const;
  double start_time() const;
};

/// Coefficients u[l][k][j] stored flat with l outermost and j innermost.
struct SolutionState {
  int angles = 0;
  int cells = 0;
  int order = 0;
  double t = 0.0;
  std::vector<double> u;

  SolutionState() = default;
  SolutionState(int n_angles, int n_cells, int basis_order, double time)
      : angles(n_angles), cells(n_cells), order(basis_order), t(time),
        u(static_cast<std::size_t>(n_angles) * n_cells * (basis_order + 1), 0.0) {}

  std::size_t index(int l, int k, int j) const {
    return (static_cast<std::size_t>(l) * cells + k) * (order + 1) + j;
  }
  double& operator()(int l, int k, int j) { return u[index(l, k, j)]; }
  double operator()(int l, int k, int j) const { return u[index(l, k, j)]; }
};

/// Per-moment driving source of one cell: the angle-l source is isotropic + mu_l * linear.
struct SourceMoments {
  std::vector<double> isotropic;
  std::vector<double> linear;
};

enum class Side { left, right };

struct ScalarFlux {
  std::vector<double> x;
  std::vector<double> total;
  std::vector<double> uncollided;
  std::vector<double> collided;  // total - uncollided
};

struct SolveResult {
  SolutionState state;
  IntegrationStats stats;
  double wall_seconds = 0.0;
};

/// Moving-mesh DG discretisation of the slab S_N transport equation for one configuration.
class TransportSolver {
 public:
  explicit TransportSolver(RunConfig config);

  const RunConfig& config() const noexcept { return config_; }
  const QuadratureSet& directions() const noexcept { return *directions_; }
  const MeshMotion& mesh() const noexcept { return mesh_; }
  const ReferenceElement& reference() const noexcept { return reference_; }
  double start_time() const noexcept { return t_start_; }
  std::size_t unknowns() const noexcept;

  /// Initial coefficients at start_time(): zero in uncollided mode and for source problems,
  /// otherwise the projection of the pulse (or MMS) profile.
  SolutionState initial_state() const;

  /// du/dt at time t.
  void rhs(double t, std::span<const double> u, std::span<double> du) const;
  SolutionState rhs(const SolutionState& state) const;

  /// (LU)^surf for angle l on cell k.
  std::vector<double> surface_flux(int l, int k, const SolutionState& state) const;

  /// Driving source projected onto the basis of cell k at time t.
  SourceMoments project_source(int k, double t) const;

  /// Inflow trace at an outer edge: the MMS wavefront value, or zero (vacuum) otherwise.
  double boundary_value(Side side, double t, double mu) const;

  /// MMS wavefront trace at the outer edge on the given side. ConfigError for other problems.
  double mms_boundary_closure(Side side, double t, double mu) const;

  /// Integrates to t_target with the configured tolerances.
  SolutionState advance(const SolutionState& state, double t_target, IntegrationStats* stats = nullptr) const;

  /// initial_state() advanced to t_final, with timing.
  SolveResult solve() const;

  /// Scalar flux at the given points. In uncollided mode phi_u is added to the DG part.
  /// A point on an interior edge is evaluated in the cell to its left.
  ScalarFlux scalar_flux(const SolutionState& state, std::span<const double> points) const;

  /// int phi dx over the mesh (collided part plus the integrated uncollided flux).
  double integrated_scalar_flux(const SolutionState& state) const;

 private:
  struct Frame {
    std::vector<double> edges;
    std::vector<double> velocities;
    std::vector<double> inv_sqrt_width;
    std::vector<double> gradient;  // K blocks of (M+1)^2, column-major
    std::vector<double> motion;
  };
  Frame frame_at(double t) const;
  void edge_fluxes(const Frame& frame, double t, double mu, const double* u_angle, double* flux) const;
  bool has_driving_source() const noexcept;
  void driving_source(double x, double t, double& iso, double& lin) const;
  void project_source_into(double x_left, double x_right, double t, const std::vector<double>& breaks,
                           const std::vector<double>& singular, double* iso, double* lin) const;
  std::vector<double> source_breaks(double t) const;

  RunConfig config_;
  const QuadratureSet* directions_;
  const QuadratureSet* cell_rule_;
  ReferenceElement reference_;
  MeshMotion mesh_;
  double t_start_;
};

}  // namespace snmesh
