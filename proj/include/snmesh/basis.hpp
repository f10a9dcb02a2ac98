#pragma once

#include <cstddef>
#include <vector>

namespace snmesh {

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Orthonormal scaled-Legendre basis on one moving cell:
/// B_i(x) = sqrt(2i+1) / sqrt(x_R - x_L) * P_i(z),  z = (2x - x_L - x_R) / (x_R - x_L).
struct CellBasis {
  int order = 0;  // highest polynomial degree M
  double x_left = -1.0;
  double x_right = 1.0;
  double v_left = 0.0;
  double v_right = 0.0;

  double width() const noexcept { return x_right - x_left; }
};

/// B_i at position x. Throws DomainError outside [x_L, x_R].
double eval_basis(const CellBasis& basis, int i, double x);

/// L_ij = int B_j dB_i/dx dx.
Matrix gradient_matrix(const CellBasis& basis);

/// G_ij = int B_j dB_i/dt dx, the time derivative taken at fixed x through the moving edges.
Matrix motion_matrix(const CellBasis& basis);

/// Basis values at the cell ends.
struct EdgeTraces {
  std::vector<double> left;   // B_i(z = -1)
  std::vector<double> right;  // B_i(z = +1)
};
EdgeTraces edge_traces(const CellBasis& basis);

/// Width-independent integrals on the reference cell, shared by every cell of a given order.
///
/// With s_ij = sqrt((2i+1)(2j+1)):
///   L_ij = s_ij * A_ij / h
///   G_ij = -(hdot / 2h) delta_ij - s_ij [ (v_L + v_R) A_ij + hdot Z_ij ] / (2h)
/// where A_ij = int P_j P_i' dz and Z_ij = int z P_j P_i' dz over [-1, 1], both known exactly.
class ReferenceElement {
 public:
  explicit ReferenceElement(int order);

  int order() const noexcept { return order_; }
  int size() const noexcept { return order_ + 1; }

  double a(int i, int j) const { return a_[index(i, j)]; }
  double z(int i, int j) const { return z_[index(i, j)]; }
  double scale(int i, int j) const { return s_[index(i, j)]; }
  double root(int i) const { return root_[i]; }  // sqrt(2i+1)

  /// Fills gradient and motion matrices (row-major, (M+1)^2 each) for one cell.
  void cell_matrices(double width, double v_left, double v_right, double* gradient, double* motion) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * (order_ + 1) + j; }

  int order_;
  std::vector<double> a_;
  std::vector<double> z_;
  std::vector<double> s_;
  std::vector<double> root_;
};

}  // namespace snmesh
