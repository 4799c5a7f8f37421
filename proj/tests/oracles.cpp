#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpsweep/sparse_lu.hpp"
#include "mpsweep/strip_decomposition.hpp"

namespace oracle {

namespace {

Complex inner(const ComplexVector& x, const ComplexVector& y) {
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm(const ComplexVector& x) { return std::sqrt(std::real(inner(x, x))); }

}  // namespace

Dense to_dense(const mpsweep::CsrMatrix& m) {
  Dense d(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) d(i, cols[q]) += vals[q];
  }
  return d;
}

ComplexVector multiply(const Dense& m, const ComplexVector& x) {
  ComplexVector y(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
  }
  return y;
}

ComplexVector gauss_solve(Dense m, ComplexVector b) {
  const std::size_t n = m.rows;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
    }
    if (m(p, c) == Complex{}) throw std::runtime_error("gauss_solve: singular");
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      std::swap(b[p], b[c]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = m(r, c) / m(c, c);
      if (f == Complex{}) continue;
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
      b[r] -= f * b[c];
    }
  }
  ComplexVector x(n);
  for (std::size_t r = n; r-- > 0;) {
    Complex s = b[r];
    for (std::size_t j = r + 1; j < n; ++j) s -= m(r, j) * x[j];
    x[r] = s / m(r, r);
  }
  return x;
}

ComplexVector normal_equations_lsq(const Dense& h, const ComplexVector& rhs) {
  Dense g(h.cols, h.cols);
  ComplexVector c(h.cols);
  for (std::size_t i = 0; i < h.cols; ++i) {
    for (std::size_t j = 0; j < h.cols; ++j) {
      for (std::size_t r = 0; r < h.rows; ++r) g(i, j) += std::conj(h(r, i)) * h(r, j);
    }
    for (std::size_t r = 0; r < h.rows; ++r) c[i] += std::conj(h(r, i)) * rhs[r];
  }
  return gauss_solve(std::move(g), std::move(c));
}

double distance_to_span(const std::vector<ComplexVector>& columns, const ComplexVector& b) {
  std::vector<ComplexVector> q;
  for (auto v : columns) {
    const double before = norm(v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        const Complex c = inner(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
      }
    }
    const double after = norm(v);
    if (after <= 1e-12 * before) continue;
    for (auto& x : v) x /= after;
    q.push_back(std::move(v));
  }
  ComplexVector r = b;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : q) {
      const Complex c = inner(u, r);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * u[i];
    }
  }
  return norm(r);
}

double rel_diff(const ComplexVector& x, const ComplexVector& y) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += std::norm(x[i] - y[i]);
    den += std::norm(y[i]);
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

double max_abs(const ComplexVector& x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

ComplexVector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexVector v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

Dense random_matrix(std::size_t n, std::mt19937_64& rng, double shift) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dense m(n, n);
  for (auto& x : m.a) x = {u(rng), u(rng)};
  for (std::size_t i = 0; i < n; ++i) m(i, i) += shift;
  return m;
}

Dense random_spd(std::size_t n, std::mt19937_64& rng, double shift) {
  const Dense b = random_matrix(n, rng, 0.0);
  Dense m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t r = 0; r < n; ++r) m(i, j) += b(i, r) * std::conj(b(j, r));
    }
    m(i, i) += shift;
  }
  return m;
}

void DenseOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const auto y = multiply(m_, ComplexVector(in.begin(), in.end()));
  std::copy(y.begin(), y.end(), out.begin());
}

void DenseInverseOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const auto y = gauss_solve(m_, ComplexVector(in.begin(), in.end()));
  std::copy(y.begin(), y.end(), out.begin());
}

std::vector<ComplexVector> textbook_gmres(const Dense& a, const std::function<ComplexVector(const ComplexVector&)>& prec,
                                          const ComplexVector& b, std::size_t iterations) {
  const std::size_t n = b.size();
  const double beta = norm(b);
  std::vector<ComplexVector> v{b};
  for (auto& x : v[0]) x /= beta;
  std::vector<std::vector<Complex>> h;  // h[j] is column j, length j + 2
  std::vector<Complex> cs;
  std::vector<Complex> sn;
  std::vector<Complex> g{beta};
  std::vector<ComplexVector> iterates;
  for (std::size_t j = 0; j < iterations; ++j) {
    auto w = multiply(a, prec(v[j]));
    std::vector<Complex> col(j + 2);
    for (std::size_t i = 0; i <= j; ++i) {
      col[i] = inner(v[i], w);
      for (std::size_t q = 0; q < n; ++q) w[q] -= col[i] * v[i][q];
    }
    col[j + 1] = norm(w);
    for (auto& x : w) x /= col[j + 1];
    v.push_back(std::move(w));
    // apply previous rotations, then a new one that zeroes col[j + 1]
    for (std::size_t i = 0; i < j; ++i) {
      const Complex t = std::conj(cs[i]) * col[i] + std::conj(sn[i]) * col[i + 1];
      col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
      col[i] = t;
    }
    const double r = std::hypot(std::abs(col[j]), std::abs(col[j + 1]));
    cs.push_back(col[j] / r);
    sn.push_back(col[j + 1] / r);
    col[j] = r;
    col[j + 1] = 0.0;
    g.push_back(-sn[j] * g[j]);
    g[j] = std::conj(cs[j]) * g[j];
    h.push_back(col);
    // back substitution for y, then x = M^{-1} V y
    std::vector<Complex> y(j + 1);
    for (std::size_t i = j + 1; i-- > 0;) {
      Complex s = g[i];
      for (std::size_t c = i + 1; c <= j; ++c) s -= h[c][i] * y[c];
      y[i] = s / h[i][i];
    }
    ComplexVector vy(n);
    for (std::size_t c = 0; c <= j; ++c) {
      for (std::size_t q = 0; q < n; ++q) vy[q] += y[c] * v[c][q];
    }
    iterates.push_back(prec(vy));
  }
  return iterates;
}

ComplexVector DenseSweepOracle::apply(const ComplexVector& r, bool double_sweep) const {
  const std::size_t n = grid.n_lines();
  const double h = grid.h();
  const double k = grid.k;
  const Complex ik{0.0, k};
  const bool centred = grid.scheme == mpsweep::ImpedanceScheme::Centred;
  const Dense a = to_dense(mpsweep::assemble_helmholtz(grid));
  auto gidx = [&](std::size_t i, std::size_t j) { return j * n + i; };

  // partition: larger cell runs first, extended by one line per interface
  std::vector<std::size_t> lo(count);
  std::vector<std::size_t> hi(count);
  const std::size_t cells = n - 1;
  std::size_t p = 0;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t start = p;
    p += cells / count + (s < cells % count ? 1 : 0);
    lo[s] = s == 0 ? 0 : start - 1;
    hi[s] = s + 1 == count ? n - 1 : p + 1;
  }

  // Impedance trace on line `line` of field w, outward normal -x (minus) or +x (plus).
  auto trace = [&](const ComplexVector& w, std::size_t line, bool minus) {
    ComplexVector g(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex mid = w[gidx(line, j)];
      if (centred) {
        const Complex d = (w[gidx(line + 1, j)] - w[gidx(line - 1, j)]) / (2.0 * h);
        g[j] = (minus ? -d : d) - ik * mid;
      } else {
        const Complex in = w[gidx(minus ? line + 1 : line - 1, j)];
        g[j] = (mid - in) / h - ik * mid;
      }
    }
    return g;
  };

  // Local solve on subdomain s; g_minus / g_plus may be null (homogeneous).
  auto solve = [&](std::size_t s, const ComplexVector* g_minus, const ComplexVector* g_plus) {
    const std::size_t w = hi[s] - lo[s] + 1;
    auto lidx = [&](std::size_t i, std::size_t j) { return (i - lo[s]) + w * j; };
    Dense m(w * n, w * n);
    ComplexVector rhs(w * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = lo[s]; i <= hi[s]; ++i) {
        const std::size_t row = lidx(i, j);
        const bool minus = s > 0 && i == lo[s];
        const bool plus = s + 1 < count && i == hi[s];
        if (!minus && !plus) {
          for (std::size_t jj = 0; jj < n; ++jj) {
            for (std::size_t ii = lo[s]; ii <= hi[s]; ++ii) m(row, lidx(ii, jj)) = a(gidx(i, j), gidx(ii, jj));
          }
          rhs[row] = r[gidx(i, j)];
          continue;
        }
        const std::size_t inward = minus ? i + 1 : i - 1;
        const Complex g = minus ? (g_minus ? (*g_minus)[j] : Complex{}) : (g_plus ? (*g_plus)[j] : Complex{});
        if (centred) {
          const double weight = (j == 0 || j == n - 1) ? 0.5 : 1.0;
          const int robin = 1 + (j == 0) + (j == n - 1);
          m(row, row) = weight * (-4.0 / (h * h) + k * k + static_cast<double>(robin) * 2.0 * ik / h);
          m(row, lidx(inward, j)) = weight * 2.0 / (h * h);
          if (j == 0) {
            m(row, lidx(i, 1)) = weight * 2.0 / (h * h);
          } else if (j == n - 1) {
            m(row, lidx(i, n - 2)) = weight * 2.0 / (h * h);
          } else {
            m(row, lidx(i, j - 1)) = weight / (h * h);
            m(row, lidx(i, j + 1)) = weight / (h * h);
          }
          rhs[row] = r[gidx(i, j)] - weight * (2.0 / h) * g;
        } else {
          m(row, row) = -1.0 / (h * h) + ik / h;
          m(row, lidx(inward, j)) = 1.0 / (h * h);
          rhs[row] = -g / h;
        }
      }
    }
    const auto local = gauss_solve(std::move(m), std::move(rhs));
    ComplexVector field(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = lo[s]; i <= hi[s]; ++i) field[gidx(i, j)] = local[lidx(i, j)];
    }
    return field;
  };

  auto scatter = [&](std::size_t s, const ComplexVector& field, ComplexVector& z) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = lo[s]; i <= hi[s]; ++i) z[gidx(i, j)] = field[gidx(i, j)];
    }
  };

  std::vector<ComplexVector> v(count);
  std::vector<ComplexVector> g_up(count);
  for (std::size_t s = 0; s < count; ++s) {
    if (s > 0) g_up[s] = trace(v[s - 1], lo[s], true);
    v[s] = solve(s, s > 0 ? &g_up[s] : nullptr, nullptr);
  }
  ComplexVector z(n * n);
  if (!double_sweep) {
    for (std::size_t s = 0; s < count; ++s) scatter(s, v[s], z);
    return z;
  }
  std::vector<ComplexVector> u(count);
  u[count - 1] = v[count - 1];
  scatter(count - 1, u[count - 1], z);
  for (std::size_t s = count - 1; s-- > 0;) {
    const auto g_down = trace(u[s + 1], hi[s], false);
    u[s] = solve(s, s > 0 ? &g_up[s] : nullptr, &g_down);
    scatter(s, u[s], z);
  }
  return z;
}

double plane_wave_error(int h_exp, mpsweep::ImpedanceScheme scheme) {
  const Complex i{0.0, 1.0};
  const double k = 10.0;
  const double dx = std::cos(0.3);
  const double dy = std::sin(0.3);
  auto exact = [&](double x, double y) { return std::exp(i * k * (x * dx + y * dy)); };
  const mpsweep::GridSpec grid(h_exp, k, scheme);
  // du/dn - ik u for the outward normal (nx, ny)
  const auto g = [&](double x, double y, double nx, double ny) {
    return i * k * (nx * dx + ny * dy - 1.0) * exact(x, y);
  };
  const auto b = mpsweep::assemble_rhs(grid, nullptr, g);
  const auto u = mpsweep::factorize(mpsweep::assemble_helmholtz(grid)).solve(b);
  // one-sided corner rows are decoupled from the grid and carry no solution
  const std::size_t last = grid.n_lines() - 1;
  const auto skip = [&](std::size_t ii, std::size_t jj) {
    return scheme == mpsweep::ImpedanceScheme::OneSided && (ii == 0 || ii == last) && (jj == 0 || jj == last);
  };
  double err = 0.0;
  for (std::size_t jj = 0; jj < grid.n_lines(); ++jj) {
    for (std::size_t ii = 0; ii < grid.n_lines(); ++ii) {
      if (skip(ii, jj)) continue;
      err = std::max(err, std::abs(u[grid.index(ii, jj)] - exact(grid.coord(ii), grid.coord(jj))));
    }
  }
  return err;
}

double transmission_defect(const mpsweep::GridSpec& grid, bool y_axis, std::size_t count) {
  using namespace mpsweep;
  const Axis axis = y_axis ? Axis::Y : Axis::X;
  const auto problem = make_benchmark_problem(grid);
  const auto u = factorize(problem.a).solve(problem.b);
  const auto d = build_strips(grid, axis, count);
  double worst = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const auto op = assemble_subdomain(problem, d, s, {.factorize = false});
    ComplexVector rhs(op.size());
    ComplexVector local(op.size());
    for (std::size_t l = 0; l < op.size(); ++l) {
      rhs[l] = problem.b[op.local_to_global[l]];
      local[l] = u[op.local_to_global[l]];
    }
    for (const auto side : {Side::Minus, Side::Plus}) {
      if (!d.has_interface(s, side)) continue;
      const auto g = trace_rhs({axis, side, side == Side::Minus ? op.first : op.last}, grid, u);
      op.impose_interface_data(side, g, rhs);
    }
    const auto au = csr_matvec(op.local_matrix, local);
    for (std::size_t l = 0; l < op.size(); ++l) worst = std::max(worst, std::abs(au[l] - rhs[l]));
  }
  return worst / max_abs(problem.b);
}

double brute_force_complete_residual(const Dense& a, std::span<const mpsweep::LinearOperator* const> precs,
                                     const ComplexVector& b, std::size_t k) {
  auto apply = [](const mpsweep::LinearOperator* m, const ComplexVector& x) {
    ComplexVector z(x.size());
    m->apply(x, z);
    return z;
  };
  std::vector<ComplexVector> level;
  std::vector<ComplexVector> images;
  for (const auto* m : precs) level.push_back(apply(m, b));
  for (std::size_t j = 1; j <= k; ++j) {
    std::vector<ComplexVector> next;
    for (const auto& w : level) {
      auto aw = multiply(a, w);
      if (j < k) {
        for (const auto* m : precs) next.push_back(apply(m, aw));
      }
      images.push_back(std::move(aw));
    }
    level = std::move(next);
  }
  return distance_to_span(images, b) / norm(b);
}

}  // namespace oracle
