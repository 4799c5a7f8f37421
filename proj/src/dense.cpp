#include "mpsweep/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpsweep {
namespace {

struct Reflector {
  std::size_t start;
  ComplexVector v;  // unit vector acting on rows start..
};

// Builds the reflector zeroing a(start+1.., col) and applies it to columns col.. of `a`.
Reflector householder_step(DenseMatrix& a, std::size_t start, std::size_t col) {
  const std::size_t m = a.rows();
  Reflector r{start, ComplexVector(m - start)};
  double xnorm = 0.0;
  for (std::size_t i = start; i < m; ++i) xnorm += std::norm(a(i, col));
  xnorm = std::sqrt(xnorm);
  if (xnorm == 0.0) {
    r.v.clear();
    return r;
  }
  const Complex x0 = a(start, col);
  const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex{1.0, 0.0};
  const Complex alpha = -phase * xnorm;
  for (std::size_t i = start; i < m; ++i) r.v[i - start] = a(i, col);
  r.v[0] -= alpha;
  const double vn = norm2(r.v);
  if (vn == 0.0) {
    r.v.clear();
    return r;
  }
  for (auto& z : r.v) z /= vn;
  for (std::size_t j = col; j < a.cols(); ++j) {
    Complex s{};
    for (std::size_t i = start; i < m; ++i) s += std::conj(r.v[i - start]) * a(i, j);
    for (std::size_t i = start; i < m; ++i) a(i, j) -= 2.0 * r.v[i - start] * s;
  }
  return r;
}

void apply_reflector(const Reflector& r, std::span<Complex> x) {
  if (r.v.empty()) return;
  Complex s{};
  for (std::size_t i = 0; i < r.v.size(); ++i) s += std::conj(r.v[i]) * x[r.start + i];
  for (std::size_t i = 0; i < r.v.size(); ++i) x[r.start + i] -= 2.0 * r.v[i] * s;
}

}  // namespace

ComplexVector DenseMatrix::multiply(std::span<const Complex> x) const {
  require_size(x.size(), cols_, "DenseMatrix::multiply");
  ComplexVector y(rows_);
  for (std::size_t j = 0; j < cols_; ++j) axpy(x[j], column(j), y);
  return y;
}

LeastSquaresResult hessenberg_lsq(const DenseMatrix& h, double beta, double rank_tol) {
  const std::size_t m = h.rows();
  const std::size_t n = h.cols();
  if (m < n || m == 0) throw DimensionError("hessenberg_lsq: H must have at least as many rows as columns");

  DenseMatrix r = h;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  ComplexVector c(m);
  c[0] = beta;

  for (std::size_t k = 0; k < n; ++k) {
    // pivot on the largest remaining column norm
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += std::norm(r(i, j));
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      std::swap_ranges(r.column(k).begin(), r.column(k).end(), r.column(best).begin());
      std::swap(perm[k], perm[best]);
    }
    const auto refl = householder_step(r, k, k);
    apply_reflector(refl, c);
  }

  LeastSquaresResult out;
  const double r00 = n > 0 ? std::abs(r(0, 0)) : 0.0;
  std::size_t rank = 0;
  while (rank < n && std::abs(r(rank, rank)) > rank_tol * r00) ++rank;
  out.rank = rank;
  out.rank_deficient = rank < n;

  double tail = 0.0;
  for (std::size_t i = rank; i < m; ++i) tail += std::norm(c[i]);
  out.resnorm = std::sqrt(tail);

  ComplexVector z(n);
  if (rank == n) {
    for (std::size_t i = n; i-- > 0;) {
      Complex acc = c[i];
      for (std::size_t j = i + 1; j < n; ++j) acc -= r(i, j) * z[j];
      z[i] = acc / r(i, i);
    }
  } else if (rank > 0) {
    // R1 = R(0:rank, :) = [T^H 0] Q2^H from the QR of R1^H.
    DenseMatrix r1h(n, rank);
    for (std::size_t i = 0; i < rank; ++i) {
      for (std::size_t j = i; j < n; ++j) r1h(j, i) = std::conj(r(i, j));
    }
    std::vector<Reflector> q2;
    for (std::size_t k = 0; k < rank; ++k) q2.push_back(householder_step(r1h, k, k));
    // T^H w = c(0:rank), T^H lower triangular with T = r1h(0:rank, 0:rank)
    for (std::size_t i = 0; i < rank; ++i) {
      Complex acc = c[i];
      for (std::size_t j = 0; j < i; ++j) acc -= std::conj(r1h(j, i)) * z[j];
      z[i] = acc / std::conj(r1h(i, i));
    }
    for (std::size_t k = rank; k-- > 0;) apply_reflector(q2[k], z);
  }

  out.y.assign(n, Complex{});
  for (std::size_t j = 0; j < n; ++j) out.y[perm[j]] = z[j];
  return out;
}

}  // namespace mpsweep
