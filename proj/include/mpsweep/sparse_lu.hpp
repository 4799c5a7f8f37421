#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpsweep/csr_matrix.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

/// A pivot vanished during elimination; `row()` is the original row index.
class SingularPivotError : public std::runtime_error {
 public:
  SingularPivotError(std::size_t row, const std::string& msg)
      : std::runtime_error(msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// The factor storage would exceed the configured byte budget.
class FillLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FactorizeOptions {
  /// Lower bound on the dense block size; bigger blocks widen the pivot search.
  std::size_t min_block = 16;
  /// Budget for the dense block factors.
  std::size_t max_factor_bytes = std::size_t{3} << 30;
  /// Try reverse Cuthill-McKee and keep it when it narrows the band.
  bool allow_reordering = true;
};

/// Sparse LU for banded-profile matrices.
///
/// The matrix is symmetrically permuted to reduce its bandwidth `w`, then cut
/// into consecutive blocks of size >= w. Every row only couples to its own
/// and the two neighbouring blocks, so the matrix is block tridiagonal and is
/// factored as
///
///   P A P^T = [S_0          ] [I  G_0      ]
///             [L_1 S_1      ] [   I   G_1  ]
///             [    L_2 S_2  ] [       I  ..]
///
/// with Schur complements S_J = D_J - L_J S_{J-1}^{-1} U_{J-1}, G_J = S_J^{-1} U_J.
/// Each S_J is stored as a dense LU with partial pivoting; L_J and U_J stay
/// sparse in the permuted copy and G_J is applied on the fly during solves.
///
/// Strip subdomains of the Helmholtz grid ordered along their short side are
/// exactly block tridiagonal with one grid line per block.
class SparseLu {
 public:
  SparseLu() = default;

  static SparseLu factorize(const CsrMatrix& a, const FactorizeOptions& opts = {});

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bandwidth_; }
  std::size_t block_size() const { return block_; }
  std::size_t block_count() const { return blocks_.size(); }
  /// perm[new_index] = original index.
  std::span<const std::size_t> permutation() const { return perm_; }
  std::size_t factor_bytes() const;

  /// Solves A x = b. Thread-safe: scratch is allocated per call.
  void solve(std::span<const Complex> b, std::span<Complex> x) const;
  ComplexVector solve(std::span<const Complex> b) const;

 private:
  struct Block {
    std::size_t offset = 0;
    std::size_t size = 0;
    std::vector<Complex> lu;  // row-major size x size
    std::vector<std::size_t> pivots;
  };

  std::size_t n_ = 0;
  std::size_t bandwidth_ = 0;
  std::size_t block_ = 0;
  std::vector<std::size_t> perm_;
  CsrMatrix permuted_;
  std::vector<Block> blocks_;
};

inline SparseLu factorize(const CsrMatrix& a, const FactorizeOptions& opts = {}) {
  return SparseLu::factorize(a, opts);
}

inline ComplexVector solve_factored(const SparseLu& f, std::span<const Complex> b) {
  return f.solve(b);
}

/// Reverse Cuthill-McKee ordering of the symmetrized pattern; perm[new] = old.
std::vector<std::size_t> reverse_cuthill_mckee(const CsrMatrix& a);

/// max |i - j| over stored entries of P A P^T.
std::size_t permuted_bandwidth(const CsrMatrix& a, std::span<const std::size_t> perm);

}  // namespace mpsweep
