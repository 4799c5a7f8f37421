#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mpsweep/csr_matrix.hpp"
#include "mpsweep/helmholtz.hpp"
#include "mpsweep/sparse_lu.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

/// Strips are cut perpendicular to `Axis`: X strips are vertical slabs
/// ordered left to right, Y strips horizontal slabs ordered bottom to top.
enum class Axis { X, Y };

/// Interface side of a strip: Minus is the low-coordinate end,
/// Plus the high-coordinate end.
enum class Side { Minus, Plus };

/// Overlapping strip decomposition of the grid lines along one axis.
///
/// Subdomains are 0-based here. Subdomain s covers the lines
/// max(p_s - 1, 0) .. min(p_{s+1} + 1, n - 1), where p_0 = 0, p_N = n - 1 and
/// p_1 < ... < p_{N-1} are the partition lines. Neighbours share 3 lines.
struct StripDecomposition {
  GridSpec grid;
  Axis axis = Axis::X;
  std::size_t count = 1;
  std::vector<std::size_t> partition_lines;

  std::size_t first_line(std::size_t s) const;
  std::size_t last_line(std::size_t s) const;
  std::size_t width(std::size_t s) const { return last_line(s) - first_line(s) + 1; }
  bool has_interface(std::size_t s, Side side) const {
    return side == Side::Minus ? s > 0 : s + 1 < count;
  }

  /// Global grid point of frame coordinates (along, cross).
  std::size_t global_index(std::size_t along, std::size_t cross) const {
    return axis == Axis::X ? grid.index(along, cross) : grid.index(cross, along);
  }
};

StripDecomposition build_strips(const GridSpec& grid, Axis axis, std::size_t count);

/// Zeroth-order impedance trace on one interface line.
struct InterfaceTrace {
  Axis axis = Axis::X;
  Side side = Side::Minus;
  std::size_t line = 0;
};

/// g_c = du/dn - ik u on the interface line, with the normal pointing out of
/// the subdomain whose interface it is. `value(along, cross)` reads the field.
/// The centred scheme reads lines line-1 .. line+1; the one-sided scheme reads
/// the interface line and its inward neighbour only.
template <class Field>
void interface_trace(ImpedanceScheme scheme, Side side, std::size_t line, std::size_t cross_count,
                     double h, double k, Field&& value, std::span<Complex> g) {
  const Complex ik{0.0, k};
  if (scheme == ImpedanceScheme::OneSided) {
    const std::size_t inward = side == Side::Minus ? line + 1 : line - 1;
    for (std::size_t c = 0; c < cross_count; ++c) {
      const Complex mid = value(line, c);
      g[c] = (mid - value(inward, c)) / h - ik * mid;
    }
    return;
  }
  const double sign = side == Side::Minus ? -1.0 : 1.0;
  for (std::size_t c = 0; c < cross_count; ++c) {
    const Complex lo = value(line - 1, c);
    const Complex mid = value(line, c);
    const Complex hi = value(line + 1, c);
    g[c] = sign * (hi - lo) / (2.0 * h) - ik * mid;
  }
}

/// Trace of a globally indexed field in the grid's scheme; throws if a line
/// the scheme needs lies outside the grid.
ComplexVector trace_rhs(const InterfaceTrace& t, const GridSpec& grid, std::span<const Complex> w);

/// Local system on one strip with impedance rows on its interface lines.
///
/// Local unknowns are ordered along-fastest: local = (along - first) + width * cross,
/// so every strip is block tridiagonal with one cross line per block.
struct SubdomainOperator {
  std::size_t index = 0;
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t width = 0;
  std::size_t cross_count = 0;
  bool minus_interface = false;
  bool plus_interface = false;
  CsrMatrix local_matrix;
  SparseLu factor;
  std::vector<std::size_t> local_to_global;
  /// Whether interface rows keep the restricted residual (centred scheme) or
  /// carry the impedance data alone (one-sided scheme).
  bool interface_keeps_residual = true;
  /// Coefficient of g on each interface-line point.
  std::vector<double> minus_data_weights;
  std::vector<double> plus_data_weights;

  std::size_t local_index(std::size_t along, std::size_t cross) const {
    return (along - first) + width * cross;
  }
  std::size_t size() const { return local_to_global.size(); }

  /// Puts impedance data g on the interface rows of a restricted residual.
  /// An empty g means homogeneous data. No-op on a side without interface.
  void impose_interface_data(Side side, std::span<const Complex> g, std::span<Complex> rhs) const;
};

struct SubdomainOptions {
  bool factorize = true;
  FactorizeOptions factor;
};

SubdomainOperator assemble_subdomain(const HelmholtzProblem& problem, const StripDecomposition& d,
                                     std::size_t s, const SubdomainOptions& opts = {});

/// Decomposition plus every factored subdomain; shared by all sweep
/// directions along the same axis.
struct SubdomainSet {
  StripDecomposition decomposition;
  std::vector<SubdomainOperator> subdomains;
  double h = 0.0;
  double k = 0.0;
};

/// Assembles and factors all subdomains, `threads` at a time.
std::shared_ptr<const SubdomainSet> build_subdomain_set(const HelmholtzProblem& problem,
                                                        const StripDecomposition& d,
                                                        unsigned threads = 1,
                                                        const SubdomainOptions& opts = {});

}  // namespace mpsweep
