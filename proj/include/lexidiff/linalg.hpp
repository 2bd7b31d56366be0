#pragma once

#include <cstddef>
#include <vector>

namespace lexidiff::linalg {

/// Dense row-major matrix. The systems in this project are tiny (a few dozen
/// rows), so no attempt at sparsity or blocking is made.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Solves A X = B by LU decomposition with partial pivoting, followed by one
/// step of iterative refinement. Throws SolverError if A is singular.
Matrix solve_linear(const Matrix& a, const Matrix& b);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
EigenDecomposition symmetric_eigen(const Matrix& a);

}  // namespace lexidiff::linalg
