#pragma once

#include <cstddef>
#include <span>

#include "mpsweep/csr_matrix.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

/// Square linear map on complex vectors. `apply` must be const and
/// thread-safe so several operators can run concurrently.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  virtual void apply(std::span<const Complex> x, std::span<Complex> y) const = 0;
};

class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(const CsrMatrix& a) : a_(&a) {
    if (a.rows() != a.cols()) throw DimensionError("MatrixOperator: matrix must be square");
  }
  std::size_t size() const override { return a_->rows(); }
  void apply(std::span<const Complex> x, std::span<Complex> y) const override { a_->multiply(x, y); }

 private:
  const CsrMatrix* a_;
};

}  // namespace mpsweep
