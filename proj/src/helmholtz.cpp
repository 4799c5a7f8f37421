#include "mpsweep/helmholtz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mpsweep {

GridSpec::GridSpec(int h_exp_, double k_, ImpedanceScheme scheme_)
    : h_exp(h_exp_), k(k_), scheme(scheme_) {
  if (h_exp < 1 || h_exp > 20) throw std::invalid_argument("GridSpec: h_exp must be in 1..20");
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("GridSpec: k must be positive");
}

double GridSpec::h() const { return std::ldexp(1.0, -h_exp); }

StencilRow stencil_row(double h, double k, RobinSides robin, double weight) {
  const double ih2 = 1.0 / (h * h);
  StencilRow row{Complex{-4.0 * ih2 + k * k, 0.0}, ih2, ih2, ih2, ih2};
  const Complex robin_diag = 2.0 * kI * k / h;
  auto eliminate = [&](bool minus, bool plus, Complex& lo, Complex& hi) {
    if (minus && plus) throw std::invalid_argument("stencil_row: both sides of a direction are Robin");
    if (minus) {
      lo = 0.0;
      hi = 2.0 * ih2;
      row.center += robin_diag;
    } else if (plus) {
      hi = 0.0;
      lo = 2.0 * ih2;
      row.center += robin_diag;
    }
  };
  eliminate(robin.a_minus, robin.a_plus, row.a_minus, row.a_plus);
  eliminate(robin.c_minus, robin.c_plus, row.c_minus, row.c_plus);
  row.center *= weight;
  row.a_minus *= weight;
  row.a_plus *= weight;
  row.c_minus *= weight;
  row.c_plus *= weight;
  return row;
}

ImpedanceRow impedance_row(ImpedanceScheme scheme, double h, double k, RobinSides robin,
                           double weight) {
  const int count = robin.count();
  if (count == 0) return {stencil_row(h, k, robin, 1.0), 1.0, 0.0};
  if (scheme == ImpedanceScheme::Centred) {
    return {stencil_row(h, k, robin, weight), weight, -weight * 2.0 / h};
  }
  if ((robin.a_minus && robin.a_plus) || (robin.c_minus && robin.c_plus)) {
    throw std::invalid_argument("impedance_row: both sides of a direction are Robin");
  }
  const double ih2 = 1.0 / (h * h);
  ImpedanceRow row{{static_cast<double>(count) * (-ih2 + kI * k / h), 0.0, 0.0, 0.0, 0.0}, 0.0, -1.0 / h};
  if (count == 1) {
    if (robin.a_minus) row.stencil.a_plus = ih2;
    if (robin.a_plus) row.stencil.a_minus = ih2;
    if (robin.c_minus) row.stencil.c_plus = ih2;
    if (robin.c_plus) row.stencil.c_minus = ih2;
  }
  return row;
}

RobinSides physical_sides(const GridSpec& grid, std::size_t i, std::size_t j) {
  const std::size_t last = grid.n_lines() - 1;
  return {i == 0, i == last, j == 0, j == last};
}

double boundary_row_weight(const GridSpec& grid, std::size_t i, std::size_t j) {
  return std::ldexp(1.0, -physical_sides(grid, i, j).count());
}

CsrMatrix assemble_helmholtz(const GridSpec& grid) {
  const std::size_t n = grid.n_lines();
  const double h = grid.h();
  std::vector<std::size_t> row_ptr(grid.unknowns() + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(5 * grid.unknowns());
  vals.reserve(5 * grid.unknowns());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto sides = physical_sides(grid, i, j);
      const auto r =
          impedance_row(grid.scheme, h, grid.k, sides, std::ldexp(1.0, -sides.count())).stencil;
      auto push = [&](std::size_t col, Complex v) {
        if (v == Complex{} && col != grid.index(i, j)) return;
        cols.push_back(col);
        vals.push_back(v);
      };
      // columns in increasing order: (i, j-1), (i-1, j), (i, j), (i+1, j), (i, j+1)
      if (j > 0) push(grid.index(i, j - 1), r.c_minus);
      if (i > 0) push(grid.index(i - 1, j), r.a_minus);
      push(grid.index(i, j), r.center);
      if (i + 1 < n) push(grid.index(i + 1, j), r.a_plus);
      if (j + 1 < n) push(grid.index(i, j + 1), r.c_plus);
      row_ptr[grid.index(i, j) + 1] = cols.size();
    }
  }
  return CsrMatrix(grid.unknowns(), grid.unknowns(), std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

double point_source(double k, double x, double y) {
  const double dx = x - 0.5;
  const double dy = y - 0.5;
  return 3.0e4 * std::exp(-200.0 * k * (dx * dx + dy * dy));
}

ComplexVector assemble_rhs(const GridSpec& grid, const std::function<Complex(double, double)>& f,
                           const BoundaryData& g) {
  const std::size_t n = grid.n_lines();
  const double h = grid.h();
  ComplexVector b(grid.unknowns());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.coord(i);
      const double y = grid.coord(j);
      const auto sides = physical_sides(grid, i, j);
      const auto row = impedance_row(grid.scheme, h, grid.k, sides, std::ldexp(1.0, -sides.count()));
      Complex data{};
      if (g) {
        if (sides.a_minus) data += g(x, y, -1.0, 0.0);
        if (sides.a_plus) data += g(x, y, 1.0, 0.0);
        if (sides.c_minus) data += g(x, y, 0.0, -1.0);
        if (sides.c_plus) data += g(x, y, 0.0, 1.0);
      }
      Complex v = row.data_weight * data;
      if (f && row.source_weight != 0.0) v += row.source_weight * f(x, y);
      b[grid.index(i, j)] = v;
    }
  }
  return b;
}

ComplexVector assemble_rhs(const GridSpec& grid) {
  const double k = grid.k;
  return assemble_rhs(grid, [k](double x, double y) { return Complex{point_source(k, x, y), 0.0}; },
                      nullptr);
}

HelmholtzProblem make_benchmark_problem(const GridSpec& grid) {
  return {grid, assemble_helmholtz(grid), assemble_rhs(grid)};
}

const char* scheme_name(ImpedanceScheme scheme) {
  return scheme == ImpedanceScheme::Centred ? "centred" : "one-sided";
}

ImpedanceScheme parse_scheme(std::string_view name) {
  if (name == "one-sided") return ImpedanceScheme::OneSided;
  if (name == "centred") return ImpedanceScheme::Centred;
  throw std::invalid_argument("unknown impedance scheme '" + std::string(name) +
                              "' (expected one-sided or centred)");
}

double ppwl(const GridSpec& grid) { return 2.0 * std::numbers::pi / (grid.k * grid.h()); }

double k_for_ppwl(int h_exp, double target_ppwl) {
  if (!(target_ppwl > 0.0)) throw std::invalid_argument("k_for_ppwl: target must be positive");
  return 2.0 * std::numbers::pi / (target_ppwl * std::ldexp(1.0, -h_exp));
}

}  // namespace mpsweep
