#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace snmesh {

enum class MeshLaw {
  static_mesh,    // edges fixed in time
  radial,         // x_k(t) = x_k(0) + t x_k(0) / x_K(0)
  hybrid_square,  // inner half static over the source, outer quarters fan out from +/- x0
};

std::string_view to_string(MeshLaw law);

/// Edge positions and velocities of a K-cell mesh at time t.
struct MeshState {
  std::vector<double> edges;       // K+1 positions
  std::vector<double> velocities;  // K+1 edge speeds
  MeshLaw law = MeshLaw::static_mesh;
  double x0_init = 0.0;  // initial half-width
  double t = 0.0;

  int cells() const noexcept { return static_cast<int>(edges.size()) - 1; }
};

/// Evaluates a mesh law for a fixed set of initial edges without allocating per call.
///
/// Validation happens once at construction: initial edges must be symmetric about the
/// origin and strictly increasing, except for the hybrid law, whose outer quarters start
/// as zero-width clusters at -x0 and +x0 and whose cell count must be a multiple of 4.
class MeshMotion {
 public:
  MeshMotion(MeshLaw law, std::vector<double> initial_edges);

  MeshLaw law() const noexcept { return law_; }
  int cells() const noexcept { return static_cast<int>(initial_.size()) - 1; }
  double initial_half_width() const noexcept { return initial_.back(); }
  const std::vector<double>& initial_edges() const noexcept { return initial_; }

  /// Writes K+1 positions and velocities at time t. Symmetry is exact by construction.
  void evaluate(double t, std::span<double> edges, std::span<double> velocities) const;

  MeshState at(double t) const;

 private:
  MeshLaw law_;
  std::vector<double> initial_;
};

/// Convenience wrapper over MeshMotion.
MeshState edges_at(MeshLaw law, std::span<const double> initial_edges, double t);

/// Smallest half-width where exp(-x^2/sigma^2) drops to `floor`.
double initial_width_for_gaussian(double sigma, double floor);

// Initial edge layouts.

/// K equal cells on [a, b].
std::vector<double> uniform_edges(double a, double b, int cells);

/// Hybrid layout: K/4 zero-width cells at -x0, K/2 equal cells on [-x0, x0], K/4 at +x0.
std::vector<double> hybrid_square_edges(double x0, int cells);

/// Static mesh on [-half_width, half_width] that keeps an edge at +/- x0 when the cell
/// count allows it (K a multiple of 4): K/2 equal cells inside the source and K/4 on each
/// side. Other counts fall back to uniform spacing.
std::vector<double> source_aligned_edges(double x0, double half_width, int cells);

/// Throws MeshError unless every cell has positive width.
void check_positive_widths(std::span<const double> edges, double t);

}  // namespace snmesh
