#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "mpsweep/csr_matrix.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

/// Discretisation of the impedance condition du/dn - ik u = g, used on the
/// physical boundary and on strip interfaces alike.
enum class ImpedanceScheme {
  /// First-order one-sided difference (u_b - u_in)/h - ik u_b = g, row scaled
  /// by -1/h. A corner row adds both sides and has no neighbours.
  OneSided,
  /// Second-order centred difference with the ghost value eliminated through
  /// the five-point row. Rows are weighted 2^-sides to keep A symmetric.
  Centred,
};

/// Uniform grid on the unit square with spacing h = 2^-h_exp.
struct GridSpec {
  int h_exp = 0;
  double k = 0.0;
  ImpedanceScheme scheme = ImpedanceScheme::OneSided;

  GridSpec() = default;
  GridSpec(int h_exp_, double k_, ImpedanceScheme scheme_ = ImpedanceScheme::OneSided);

  std::size_t n_lines() const { return (std::size_t{1} << h_exp) + 1; }
  std::size_t unknowns() const { return n_lines() * n_lines(); }
  double h() const;
  /// Lexicographic index, x fastest.
  std::size_t index(std::size_t i, std::size_t j) const { return j * n_lines() + i; }
  double coord(std::size_t i) const { return static_cast<double>(i) * h(); }
};

/// Robin boundary sides a grid point sits on, in the frame (a, c) of the
/// row builder: `a` is the first coordinate, `c` the second.
struct RobinSides {
  bool a_minus = false;
  bool a_plus = false;
  bool c_minus = false;
  bool c_plus = false;
  int count() const { return a_minus + a_plus + c_minus + c_plus; }
};

/// One assembled stencil row: coefficients for the centre and the four
/// neighbours (a-1, a+1, c-1, c+1). A zero coefficient means the neighbour is
/// absent (its ghost value has been eliminated).
struct StencilRow {
  Complex center;
  Complex a_minus;
  Complex a_plus;
  Complex c_minus;
  Complex c_plus;
};

/// Five-point row with centred ghost elimination through du/dn - ik u = g on
/// every side in `robin`, multiplied by `weight`.
///
/// Eliminating the ghost across a side doubles the opposite neighbour
/// coefficient and adds 2ik/h to the diagonal; the boundary datum g then
/// enters the right-hand side as -weight * (2/h) * g.
StencilRow stencil_row(double h, double k, RobinSides robin, double weight);

/// Row weight 2^-(number of physical boundary sides) for the centred scheme.
/// Halving edge rows and quartering corner rows makes the matrix symmetric.
double boundary_row_weight(const GridSpec& grid, std::size_t i, std::size_t j);

/// A row of either scheme together with how the right-hand side enters it:
/// b = source_weight * f + data_weight * (sum of g over the Robin sides).
struct ImpedanceRow {
  StencilRow stencil;
  double source_weight = 1.0;
  double data_weight = 0.0;
};

/// `weight` is the centred row weight; the one-sided scheme ignores it.
ImpedanceRow impedance_row(ImpedanceScheme scheme, double h, double k, RobinSides robin,
                           double weight);

/// Physical boundary sides of point (i, j) in the global (x, y) frame.
RobinSides physical_sides(const GridSpec& grid, std::size_t i, std::size_t j);

/// Global five-point matrix with impedance boundary rows, x-fastest ordering.
/// Absent neighbours are not stored.
CsrMatrix assemble_helmholtz(const GridSpec& grid);

/// Benchmark source sampled at the grid points, scaled like the matrix rows.
ComplexVector assemble_rhs(const GridSpec& grid);

double point_source(double k, double x, double y);

/// Inhomogeneous impedance data on the four sides of the square, used for
/// manufactured-solution checks. Called with the boundary point coordinates
/// and the outward normal (nx, ny).
using BoundaryData = std::function<Complex(double x, double y, double nx, double ny)>;

/// Right-hand side for a sampled source `f` plus boundary data `g`.
ComplexVector assemble_rhs(const GridSpec& grid, const std::function<Complex(double, double)>& f,
                           const BoundaryData& g);

struct HelmholtzProblem {
  GridSpec grid;
  CsrMatrix a;
  ComplexVector b;
};

HelmholtzProblem make_benchmark_problem(const GridSpec& grid);

const char* scheme_name(ImpedanceScheme scheme);
/// Accepts "one-sided" and "centred".
ImpedanceScheme parse_scheme(std::string_view name);

/// Points per wavelength 2 pi / (k h).
double ppwl(const GridSpec& grid);
/// Wavenumber giving `target_ppwl` points per wavelength at h = 2^-h_exp.
double k_for_ppwl(int h_exp, double target_ppwl);

}  // namespace mpsweep
