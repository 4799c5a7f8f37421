#include "mpsweep/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace mpsweep {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// In-place row-major LU with partial pivoting. Returns the local row of a
// vanishing pivot, or kNone on success.
std::size_t dense_lu(std::span<Complex> a, std::size_t m, std::vector<std::size_t>& piv,
                     double tol) {
  piv.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t p = k;
    double best = std::abs(a[k * m + k]);
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = std::abs(a[i * m + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv[k] = p;
    if (!(best > tol)) return k;
    if (p != k) {
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(k * m),
                       a.begin() + static_cast<std::ptrdiff_t>((k + 1) * m),
                       a.begin() + static_cast<std::ptrdiff_t>(p * m));
    }
    const Complex inv = 1.0 / a[k * m + k];
    Complex* rowk = a.data() + k * m;
    for (std::size_t i = k + 1; i < m; ++i) {
      Complex* rowi = a.data() + i * m;
      if (rowi[k] == Complex{}) continue;
      const Complex l = rowi[k] * inv;
      rowi[k] = l;
      for (std::size_t j = k + 1; j < m; ++j) rowi[j] -= l * rowk[j];
    }
  }
  return kNone;
}

void dense_lu_solve(std::span<const Complex> lu, std::size_t m,
                    std::span<const std::size_t> piv, Complex* x) {
  for (std::size_t k = 0; k < m; ++k) {
    if (piv[k] != k) std::swap(x[k], x[piv[k]]);
  }
  for (std::size_t i = 1; i < m; ++i) {
    const Complex* row = lu.data() + i * m;
    Complex acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * x[j];
    x[i] = acc;
  }
  for (std::size_t i = m; i-- > 0;) {
    const Complex* row = lu.data() + i * m;
    Complex acc = x[i];
    for (std::size_t j = i + 1; j < m; ++j) acc -= row[j] * x[j];
    x[i] = acc / row[i];
  }
}

CsrMatrix permute_symmetric(const CsrMatrix& a, std::span<const std::size_t> perm) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) t.push_back({inv[i], inv[cols[p]], vals[p]});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

std::vector<std::size_t> reverse_cuthill_mckee(const CsrMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto j : a.row_cols(i)) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  auto by_degree = [&](std::size_t x, std::size_t y) {
    return adj[x].size() != adj[y].size() ? adj[x].size() < adj[y].size() : x < y;
  };

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> placed(n, 0);
  std::vector<std::size_t> level(n);

  // BFS returning the last vertex reached and the eccentricity of `root`.
  auto bfs_far = [&](std::size_t root) {
    std::vector<std::size_t> lvl(n, kNone);
    std::queue<std::size_t> q;
    q.push(root);
    lvl[root] = 0;
    std::size_t far = root;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      if (lvl[v] > lvl[far] || (lvl[v] == lvl[far] && by_degree(v, far))) far = v;
      for (const auto w : adj[v]) {
        if (lvl[w] == kNone) {
          lvl[w] = lvl[v] + 1;
          q.push(w);
        }
      }
    }
    return std::pair{far, lvl[far]};
  };

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (placed[seed]) continue;
    // pseudo-peripheral start
    std::size_t start = seed;
    auto [far, ecc] = bfs_far(start);
    for (int it = 0; it < 8; ++it) {
      auto [far2, ecc2] = bfs_far(far);
      if (ecc2 <= ecc) break;
      start = far;
      far = far2;
      ecc = ecc2;
    }
    start = far;
    std::size_t head = order.size();
    order.push_back(start);
    placed[start] = 1;
    while (head < order.size()) {
      const auto v = order[head++];
      std::vector<std::size_t> next;
      for (const auto w : adj[v]) {
        if (!placed[w]) {
          placed[w] = 1;
          next.push_back(w);
        }
      }
      std::sort(next.begin(), next.end(), by_degree);
      order.insert(order.end(), next.begin(), next.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::size_t permuted_bandwidth(const CsrMatrix& a, std::span<const std::size_t> perm) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  std::size_t bw = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto j : a.row_cols(i)) {
      const auto pi = inv[i];
      const auto pj = inv[j];
      bw = std::max(bw, pi > pj ? pi - pj : pj - pi);
    }
  }
  return bw;
}

SparseLu SparseLu::factorize(const CsrMatrix& a, const FactorizeOptions& opts) {
  if (a.rows() != a.cols()) throw DimensionError("factorize: matrix must be square");
  SparseLu f;
  const std::size_t n = a.rows();
  f.n_ = n;
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});
  f.bandwidth_ = permuted_bandwidth(a, f.perm_);
  if (opts.allow_reordering && n > 2) {
    auto rcm = reverse_cuthill_mckee(a);
    const auto bw = permuted_bandwidth(a, rcm);
    if (bw < f.bandwidth_) {
      f.bandwidth_ = bw;
      f.perm_ = std::move(rcm);
    }
  }
  if (n == 0) return f;

  const bool identity_perm = std::is_sorted(f.perm_.begin(), f.perm_.end());
  f.permuted_ = identity_perm ? a : permute_symmetric(a, f.perm_);
  f.block_ = std::min(n, std::max(f.bandwidth_, std::max<std::size_t>(opts.min_block, 1)));

  const std::size_t nb = (n + f.block_ - 1) / f.block_;
  std::size_t bytes = 0;
  for (std::size_t J = 0; J < nb; ++J) {
    const std::size_t m = std::min(f.block_, n - J * f.block_);
    bytes += m * m * sizeof(Complex);
  }
  if (bytes > opts.max_factor_bytes) {
    throw FillLimitError("factorize: dense block factors need " + std::to_string(bytes) +
                         " bytes, limit is " + std::to_string(opts.max_factor_bytes));
  }

  const double tol = std::numeric_limits<double>::epsilon() * a.max_abs();
  const CsrMatrix& p = f.permuted_;
  f.blocks_.resize(nb);
  std::vector<Complex> col;
  for (std::size_t J = 0; J < nb; ++J) {
    Block& blk = f.blocks_[J];
    blk.offset = J * f.block_;
    blk.size = std::min(f.block_, n - blk.offset);
    const std::size_t off = blk.offset;
    const std::size_t m = blk.size;
    blk.lu.assign(m * m, Complex{});
    for (std::size_t r = 0; r < m; ++r) {
      const auto cols = p.row_cols(off + r);
      const auto vals = p.row_values(off + r);
      for (std::size_t q = 0; q < cols.size(); ++q) {
        if (cols[q] >= off && cols[q] < off + m) blk.lu[r * m + (cols[q] - off)] = vals[q];
      }
    }

    if (J > 0) {
      // S_J -= L_J * S_{J-1}^{-1} * U_{J-1}, one needed column of U at a time.
      const Block& prev = f.blocks_[J - 1];
      const std::size_t pm = prev.size;
      const std::size_t poff = prev.offset;
      std::vector<std::vector<Complex>> ucols(m);
      for (std::size_t r = 0; r < pm; ++r) {
        const auto cols = p.row_cols(poff + r);
        const auto vals = p.row_values(poff + r);
        for (std::size_t q = 0; q < cols.size(); ++q) {
          if (cols[q] < off) continue;
          auto& c = ucols[cols[q] - off];
          if (c.empty()) c.assign(pm, Complex{});
          c[r] = vals[q];
        }
      }
      for (auto& c : ucols) {
        if (!c.empty()) dense_lu_solve(prev.lu, pm, prev.pivots, c.data());
      }
      for (std::size_t r = 0; r < m; ++r) {
        const auto cols = p.row_cols(off + r);
        const auto vals = p.row_values(off + r);
        Complex* srow = blk.lu.data() + r * m;
        for (std::size_t q = 0; q < cols.size() && cols[q] < off; ++q) {
          const std::size_t mr = cols[q] - poff;
          const Complex l = vals[q];
          for (std::size_t c = 0; c < m; ++c) {
            if (!ucols[c].empty()) srow[c] -= l * ucols[c][mr];
          }
        }
      }
    }

    const auto bad = dense_lu(blk.lu, m, blk.pivots, tol);
    if (bad != kNone) {
      const std::size_t row = f.perm_[off + bad];
      throw SingularPivotError(row, "factorize: singular pivot at row " + std::to_string(row));
    }
  }
  return f;
}

std::size_t SparseLu::factor_bytes() const {
  std::size_t b = 0;
  for (const auto& blk : blocks_) b += blk.lu.size() * sizeof(Complex);
  return b;
}

void SparseLu::solve(std::span<const Complex> b, std::span<Complex> x) const {
  require_size(b.size(), n_, "solve_factored rhs");
  require_size(x.size(), n_, "solve_factored solution");
  if (n_ == 0) return;
  ComplexVector y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
  const CsrMatrix& p = permuted_;

  for (const auto& blk : blocks_) {
    const std::size_t off = blk.offset;
    for (std::size_t r = 0; r < blk.size; ++r) {
      const auto cols = p.row_cols(off + r);
      const auto vals = p.row_values(off + r);
      Complex acc = y[off + r];
      for (std::size_t q = 0; q < cols.size() && cols[q] < off; ++q) acc -= vals[q] * y[cols[q]];
      y[off + r] = acc;
    }
    dense_lu_solve(blk.lu, blk.size, blk.pivots, y.data() + off);
  }

  ComplexVector t(block_);
  for (std::size_t J = blocks_.size() - 1; J-- > 0;) {
    const Block& blk = blocks_[J];
    const std::size_t off = blk.offset;
    const std::size_t next = off + blk.size;
    for (std::size_t r = 0; r < blk.size; ++r) {
      const auto cols = p.row_cols(off + r);
      const auto vals = p.row_values(off + r);
      Complex acc{};
      for (std::size_t q = cols.size(); q-- > 0 && cols[q] >= next;) acc += vals[q] * y[cols[q]];
      t[r] = acc;
    }
    dense_lu_solve(blk.lu, blk.size, blk.pivots, t.data());
    for (std::size_t r = 0; r < blk.size; ++r) y[off + r] -= t[r];
  }

  for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = y[i];
}

ComplexVector SparseLu::solve(std::span<const Complex> b) const {
  ComplexVector x(n_);
  solve(b, x);
  return x;
}

}  // namespace mpsweep
