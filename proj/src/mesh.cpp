#include "snmesh/mesh.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "snmesh/errors.hpp"

namespace snmesh {

std::string_view to_string(MeshLaw law) {
  switch (law) {
    case MeshLaw::static_mesh:
      return "static";
    case MeshLaw::radial:
      return "radial";
    case MeshLaw::hybrid_square:
      return "hybrid-square";
  }
  return "unknown";
}

namespace {

void check_symmetric(std::span<const double> edges) {
  const std::size_t n = edges.size();
  const double scale = std::max(std::abs(edges.front()), std::abs(edges.back()));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(edges[i] + edges[n - 1 - i]) > 1e-12 * scale) {
      throw MeshError("initial edges are not symmetric about the origin");
    }
  }
}

}  // namespace

void check_positive_widths(std::span<const double> edges, double t) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      std::ostringstream msg;
      msg << "mesh edges " << i - 1 << " and " << i << " are not increasing at t=" << t << " ("
          << edges[i - 1] << ", " << edges[i] << ")";
      throw MeshError(msg.str());
    }
  }
}

MeshMotion::MeshMotion(MeshLaw law, std::vector<double> initial_edges)
    : law_(law), initial_(std::move(initial_edges)) {
  if (initial_.size() < 2) throw MeshError("a mesh needs at least one cell");
  check_symmetric(initial_);
  const int k_cells = cells();
  if (law_ == MeshLaw::hybrid_square) {
    if (k_cells < 4 || k_cells % 4 != 0) {
      throw InvalidArgument("hybrid-square mesh needs a cell count that is a multiple of 4 and at least 4, got " +
                            std::to_string(k_cells));
    }
    const int quarter = k_cells / 4;
    const double x0 = initial_.back();
    for (int k = 0; k <= quarter; ++k) {
      if (initial_[k] != -x0 || initial_[k_cells - k] != x0) {
        throw InvalidArgument("hybrid-square mesh: outer quarters must start as zero-width clusters at +/- x0");
      }
    }
    check_positive_widths(std::span(initial_).subspan(quarter, 2 * quarter + 1), 0.0);
  } else {
    check_positive_widths(initial_, 0.0);
  }
  if (law_ == MeshLaw::radial && !(initial_.back() > 0.0)) {
    throw MeshError("radial mesh needs a positive outer edge");
  }
}

void MeshMotion::evaluate(double t, std::span<double> edges, std::span<double> velocities) const {
  const int k_cells = cells();
  const double outer = initial_.back();
  // Compute the right half (k >= K/2) and mirror it.
  for (int k = k_cells / 2; k <= k_cells; ++k) {
    const double x_init = initial_[k];
    double x = x_init;
    double v = 0.0;
    switch (law_) {
      case MeshLaw::static_mesh:
        break;
      case MeshLaw::radial:
        v = x_init / outer;
        x = x_init + v * t;
        break;
      case MeshLaw::hybrid_square: {
        const int quarter = k_cells / 4;
        const int first_moving = 3 * quarter;
        if (k > first_moving) {
          v = static_cast<double>(k - first_moving) / quarter;
          x = x_init + v * t;
        }
        break;
      }
    }
    edges[k] = x;
    velocities[k] = v;
    edges[k_cells - k] = -x;
    velocities[k_cells - k] = -v;
  }
  if (k_cells % 2 == 0 && initial_[k_cells / 2] == 0.0) {
    edges[k_cells / 2] = 0.0;
    velocities[k_cells / 2] = 0.0;
  }
}

MeshState MeshMotion::at(double t) const {
  MeshState state;
  state.edges.resize(initial_.size());
  state.velocities.resize(initial_.size());
  evaluate(t, state.edges, state.velocities);
  state.law = law_;
  state.x0_init = initial_.back();
  state.t = t;
  return state;
}

MeshState edges_at(MeshLaw law, std::span<const double> initial_edges, double t) {
  return MeshMotion(law, std::vector<double>(initial_edges.begin(), initial_edges.end())).at(t);
}

double initial_width_for_gaussian(double sigma, double floor) {
  if (!(sigma > 0.0)) throw InvalidArgument("initial_width_for_gaussian: sigma must be positive");
  if (!(floor > 0.0 && floor < 1.0)) throw InvalidArgument("initial_width_for_gaussian: floor must lie in (0, 1)");
  return sigma * std::sqrt(-std::log(floor));
}

std::vector<double> uniform_edges(double a, double b, int cells) {
  if (cells < 1) throw InvalidArgument("uniform_edges: need at least one cell");
  if (!(b > a)) throw MeshError("uniform_edges: empty interval");
  std::vector<double> edges(cells + 1);
  for (int k = 0; k <= cells; ++k) edges[k] = a + (b - a) * k / cells;
  // Exact symmetry for centred intervals.
  if (a == -b) {
    for (int k = 0; k <= cells / 2; ++k) edges[k] = -edges[cells - k];
    if (cells % 2 == 0) edges[cells / 2] = 0.0;
  }
  edges.front() = a;
  edges.back() = b;
  return edges;
}

std::vector<double> hybrid_square_edges(double x0, int cells) {
  if (cells < 4 || cells % 4 != 0) {
    throw InvalidArgument("hybrid-square mesh needs a cell count that is a multiple of 4 and at least 4, got " +
                          std::to_string(cells));
  }
  if (!(x0 > 0.0)) throw InvalidArgument("hybrid-square mesh needs x0 > 0");
  const int quarter = cells / 4;
  std::vector<double> edges(cells + 1);
  const auto inner = uniform_edges(-x0, x0, 2 * quarter);
  for (int k = 0; k <= cells; ++k) {
    if (k <= quarter) {
      edges[k] = -x0;
    } else if (k >= 3 * quarter) {
      edges[k] = x0;
    } else {
      edges[k] = inner[k - quarter];
    }
  }
  return edges;
}

std::vector<double> source_aligned_edges(double x0, double half_width, int cells) {
  if (!(half_width > x0 && x0 > 0.0)) throw InvalidArgument("source_aligned_edges: need 0 < x0 < half_width");
  if (cells < 4 || cells % 4 != 0) return uniform_edges(-half_width, half_width, cells);
  const int quarter = cells / 4;
  std::vector<double> edges(cells + 1);
  const auto inner = uniform_edges(-x0, x0, 2 * quarter);
  const auto right = uniform_edges(x0, half_width, quarter);
  for (int k = 0; k <= 2 * quarter; ++k) edges[quarter + k] = inner[k];
  for (int k = 0; k <= quarter; ++k) {
    edges[3 * quarter + k] = right[k];
    edges[quarter - k] = -right[k];
  }
  return edges;
}

}  // namespace snmesh
