#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coherent {

/// Dense row-major matrix of doubles. Sized for the small (n <= 50) systems
/// that appear in ion-string problems.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t j) const;

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

/// Largest absolute entry of a - b. Shapes must agree.
double max_abs_difference(const Matrix& a, const Matrix& b);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column p is the eigenvector of values[p]
};

/// Full eigen-decomposition of a symmetric matrix by cyclic Jacobi
/// rotations. Sweeps stop once the off-diagonal Frobenius norm drops below
/// `tolerance` times the matrix norm. Eigenvectors are sign-normalized so that
/// their largest-magnitude component is positive (first one on ties), which
/// makes the output deterministic. Throws SolverFailure after `max_sweeps`.
SymmetricEigen jacobi_eigen(Matrix a, double tolerance = 1e-14,
                            int max_sweeps = 100);

}  // namespace coherent
