#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mpsweep/types.hpp"

namespace mpsweep {

/// Small column-major dense matrix for projected Krylov problems.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<Complex> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> column(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  ComplexVector multiply(std::span<const Complex> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

struct LeastSquaresResult {
  ComplexVector y;
  double resnorm = 0.0;
  std::size_t rank = 0;
  bool rank_deficient = false;
};

/// Minimises ||beta e_1 - H y||_2 for a tall H.
///
/// Householder QR with column pivoting; when the numerical rank falls below
/// the column count the minimum-norm solution is returned through a complete
/// orthogonal decomposition and `rank_deficient` is set.
LeastSquaresResult hessenberg_lsq(const DenseMatrix& h, double beta, double rank_tol = 1e-13);

}  // namespace mpsweep
