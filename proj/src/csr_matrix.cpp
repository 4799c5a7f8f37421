#include "mpsweep/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <iomanip>

namespace mpsweep {

CsrMatrix::CsrMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<Complex> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  require_size(row_ptr_.size(), nrows_ + 1, "CsrMatrix row_ptr");
  require_size(values_.size(), col_idx_.size(), "CsrMatrix values");
  if (row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size()) {
    throw std::invalid_argument("CsrMatrix: row_ptr must start at 0 and end at nnz");
  }
  for (std::size_t i = 0; i < nrows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) {
      throw std::invalid_argument("CsrMatrix: row_ptr not monotone");
    }
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] >= ncols_) throw std::invalid_argument("CsrMatrix: column out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1]) {
        throw std::invalid_argument("CsrMatrix: columns not strictly increasing in row " +
                                    std::to_string(i));
      }
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                   std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(nrows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const auto& e = triplets[t];
    if (e.row >= nrows || e.col >= ncols) {
      throw std::invalid_argument("CsrMatrix::from_triplets: index out of range");
    }
    if (t > 0 && triplets[t - 1].row == e.row && triplets[t - 1].col == e.col) {
      vals.back() += e.value;
      continue;
    }
    cols.push_back(e.col);
    vals.push_back(e.value);
    ++row_ptr[e.row + 1];
  }
  for (std::size_t i = 0; i < nrows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1);
  std::vector<std::size_t> ci(n);
  for (std::size_t i = 0; i <= n; ++i) rp[i] = i;
  for (std::size_t i = 0; i < n; ++i) ci[i] = i;
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<Complex>(n, 1.0));
}

Complex CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return {};
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

double CsrMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

void CsrMatrix::multiply(std::span<const Complex> x, std::span<Complex> y) const {
  require_size(x.size(), ncols_, "csr_matvec input");
  require_size(y.size(), nrows_, "csr_matvec output");
  for (std::size_t i = 0; i < nrows_; ++i) {
    Complex acc{};
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += values_[p] * x[col_idx_[p]];
    y[i] = acc;
  }
}

ComplexVector CsrMatrix::multiply(std::span<const Complex> x) const {
  ComplexVector y(nrows_);
  multiply(x, y);
  return y;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      out << i + 1 << ' ' << cols[p] + 1 << ' ' << vals[p].real() << ' ' << vals[p].imag() << '\n';
    }
  }
}

void write_vector_text(std::ostream& out, std::span<const Complex> v) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& z : v) out << z.real() << ' ' << z.imag() << '\n';
}

}  // namespace mpsweep
