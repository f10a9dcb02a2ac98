#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace snmesh {

/// Nodes and weights of a symmetric rule on [-1, 1].
struct QuadratureSet {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // all positive, summing to 2

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Lobatto rule (endpoints included), exact to degree 2n-3.
/// Results are cached by n; the returned reference stays valid for the program lifetime.
const QuadratureSet& gauss_lobatto(int n_points);

/// n-point Gauss-Legendre rule, exact to degree 2n-1. Cached like gauss_lobatto.
const QuadratureSet& gauss_legendre(int n_points);

/// P_n(x) and P_n'(x) by the three-term recurrence.
struct LegendrePair {
  double value;
  double derivative;
};
LegendrePair legendre(int n, double x);

/// Fills out[i] = P_i(x) for i = 0 .. out.size()-1.
void legendre_values(double x, std::span<double> out);

}  // namespace snmesh
