#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mpsweep/types.hpp"

namespace mpsweep {

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Compressed sparse row matrix over complex scalars.
///
/// Column indices are strictly increasing within each row. Instances are
/// immutable once built, so concurrent matvecs on a shared matrix are safe.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Takes ownership of raw CSR arrays after validating them.
  CsrMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<Complex> values);

  /// Builds from unordered triplets; duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                 std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const { return nrows_; }
  std::size_t cols() const { return ncols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const Complex> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return std::span(col_idx_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const Complex> row_values(std::size_t i) const {
    return std::span(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }

  /// Entry (i, j), zero when not stored.
  Complex at(std::size_t i, std::size_t j) const;

  double frobenius_norm() const;
  double max_abs() const;

  /// y = A x, summing each row left to right.
  void multiply(std::span<const Complex> x, std::span<Complex> y) const;
  ComplexVector multiply(std::span<const Complex> x) const;

  bool operator==(const CsrMatrix&) const = default;

 private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<Complex> values_;
};

inline ComplexVector csr_matvec(const CsrMatrix& a, std::span<const Complex> x) {
  return a.multiply(x);
}

/// Writes "%%MatrixMarket matrix coordinate complex general" with 1-based indices.
void write_matrix_market(std::ostream& out, const CsrMatrix& a);
/// Writes one "re im" line per entry.
void write_vector_text(std::ostream& out, std::span<const Complex> v);

}  // namespace mpsweep
