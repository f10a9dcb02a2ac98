#include "snmesh/basis.hpp"

#include <cmath>
#include <sstream>

#include "snmesh/errors.hpp"
#include "snmesh/quadrature.hpp"

namespace snmesh {

ReferenceElement::ReferenceElement(int order) : order_(order) {
  if (order < 0) throw InvalidArgument("basis order must be non-negative");
  const int n = order + 1;
  a_.assign(static_cast<std::size_t>(n) * n, 0.0);
  z_.assign(static_cast<std::size_t>(n) * n, 0.0);
  s_.assign(static_cast<std::size_t>(n) * n, 0.0);
  root_.resize(n);
  for (int i = 0; i < n; ++i) root_[i] = std::sqrt(2.0 * i + 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s_[index(i, j)] = root_[i] * root_[j];
      // P_i' = sum over k < i with i-k odd of (2k+1) P_k, so int P_j P_i' = 2 for those j.
      if (j < i && (i + j) % 2 == 1) a_[index(i, j)] = 2.0;
      // z P_i' = i P_i + sum over k < i with i-k even of (2k+1) P_k.
      if (j == i) {
        z_[index(i, j)] = 2.0 * i / (2.0 * i + 1.0);
      } else if (j < i && (i - j) % 2 == 0) {
        z_[index(i, j)] = 2.0;
      }
    }
  }
}

void ReferenceElement::cell_matrices(double width, double v_left, double v_right, double* gradient,
                                     double* motion) const {
  const int n = order_ + 1;
  const double inv_h = 1.0 / width;
  const double hdot = v_right - v_left;
  const double vsum = v_left + v_right;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t ij = index(i, j);
      gradient[ij] = s_[ij] * a_[ij] * inv_h;
      double g = -0.5 * inv_h * s_[ij] * (vsum * a_[ij] + hdot * z_[ij]);
      if (i == j) g -= 0.5 * hdot * inv_h;
      motion[ij] = g;
    }
  }
}

double eval_basis(const CellBasis& basis, int i, double x) {
  if (i < 0 || i > basis.order) throw InvalidArgument("eval_basis: moment index out of range");
  if (x < basis.x_left || x > basis.x_right) {
    std::ostringstream msg;
    msg << "eval_basis: x=" << x << " outside cell [" << basis.x_left << ", " << basis.x_right << "]";
    throw DomainError(msg.str());
  }
  const double h = basis.width();
  const double z = (2.0 * x - basis.x_left - basis.x_right) / h;
  return std::sqrt((2.0 * i + 1.0) / h) * legendre(i, z).value;
}

Matrix gradient_matrix(const CellBasis& basis) {
  const ReferenceElement ref(basis.order);
  Matrix gradient(ref.size(), ref.size());
  Matrix motion(ref.size(), ref.size());
  ref.cell_matrices(basis.width(), basis.v_left, basis.v_right, &gradient(0, 0), &motion(0, 0));
  return gradient;
}

Matrix motion_matrix(const CellBasis& basis) {
  const ReferenceElement ref(basis.order);
  Matrix gradient(ref.size(), ref.size());
  Matrix motion(ref.size(), ref.size());
  ref.cell_matrices(basis.width(), basis.v_left, basis.v_right, &gradient(0, 0), &motion(0, 0));
  return motion;
}

EdgeTraces edge_traces(const CellBasis& basis) {
  const int n = basis.order + 1;
  const double inv_sqrt_h = 1.0 / std::sqrt(basis.width());
  EdgeTraces traces;
  traces.left.resize(n);
  traces.right.resize(n);
  for (int i = 0; i < n; ++i) {
    const double value = std::sqrt(2.0 * i + 1.0) * inv_sqrt_h;
    traces.right[i] = value;
    traces.left[i] = (i % 2 == 0) ? value : -value;
  }
  return traces;
}

}  // namespace snmesh
