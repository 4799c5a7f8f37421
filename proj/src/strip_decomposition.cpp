#include "mpsweep/strip_decomposition.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace mpsweep {

std::size_t StripDecomposition::first_line(std::size_t s) const {
  if (s >= count) throw std::out_of_range("StripDecomposition: subdomain index");
  return s == 0 ? 0 : partition_lines[s - 1] - 1;
}

std::size_t StripDecomposition::last_line(std::size_t s) const {
  if (s >= count) throw std::out_of_range("StripDecomposition: subdomain index");
  return s + 1 == count ? grid.n_lines() - 1 : partition_lines[s] + 1;
}

StripDecomposition build_strips(const GridSpec& grid, Axis axis, std::size_t count) {
  const std::size_t cells = grid.n_lines() - 1;
  if (count < 1) throw std::invalid_argument("build_strips: need at least one subdomain");
  if (count > cells / 4) {
    throw std::invalid_argument("build_strips: " + std::to_string(count) +
                                " strips need at least 4 cells each, grid has " +
                                std::to_string(cells));
  }
  StripDecomposition d{grid, axis, count, {}};
  const std::size_t base = cells / count;
  const std::size_t extra = cells % count;
  std::size_t line = 0;
  for (std::size_t s = 0; s + 1 < count; ++s) {
    line += base + (s < extra ? 1 : 0);
    d.partition_lines.push_back(line);
  }
  return d;
}

ComplexVector trace_rhs(const InterfaceTrace& t, const GridSpec& grid, std::span<const Complex> w) {
  require_size(w.size(), grid.unknowns(), "trace_rhs field");
  const std::size_t n = grid.n_lines();
  const bool centred = grid.scheme == ImpedanceScheme::Centred;
  const bool need_lo = centred || t.side == Side::Plus;
  const bool need_hi = centred || t.side == Side::Minus;
  if (t.line >= n || (need_lo && t.line == 0) || (need_hi && t.line + 1 >= n)) {
    throw std::invalid_argument("trace_rhs: interface line " + std::to_string(t.line) +
                                " lacks the neighbour lines the scheme reads");
  }
  ComplexVector g(n);
  auto value = [&](std::size_t along, std::size_t cross) {
    return t.axis == Axis::X ? w[grid.index(along, cross)] : w[grid.index(cross, along)];
  };
  interface_trace(grid.scheme, t.side, t.line, n, grid.h(), grid.k, value, g);
  return g;
}

void SubdomainOperator::impose_interface_data(Side side, std::span<const Complex> g,
                                              std::span<Complex> rhs) const {
  if (!(side == Side::Minus ? minus_interface : plus_interface)) return;
  if (!g.empty()) require_size(g.size(), cross_count, "interface data");
  const std::size_t line = side == Side::Minus ? first : last;
  const auto& weights = side == Side::Minus ? minus_data_weights : plus_data_weights;
  for (std::size_t c = 0; c < cross_count; ++c) {
    Complex& r = rhs[local_index(line, c)];
    if (!interface_keeps_residual) r = 0.0;
    if (!g.empty()) r += weights[c] * g[c];
  }
}

SubdomainOperator assemble_subdomain(const HelmholtzProblem& problem, const StripDecomposition& d,
                                     std::size_t s, const SubdomainOptions& opts) {
  const GridSpec& grid = problem.grid;
  const std::size_t n = grid.n_lines();
  require_size(problem.a.rows(), grid.unknowns(), "assemble_subdomain matrix");

  SubdomainOperator op;
  op.index = s;
  op.first = d.first_line(s);
  op.last = d.last_line(s);
  op.width = op.last - op.first + 1;
  op.cross_count = n;
  op.minus_interface = d.has_interface(s, Side::Minus);
  op.plus_interface = d.has_interface(s, Side::Plus);
  op.local_to_global.resize(op.width * n);

  auto frame_of = [&](std::size_t g) {
    const std::size_t i = g % n;
    const std::size_t j = g / n;
    return d.axis == Axis::X ? std::pair{i, j} : std::pair{j, i};
  };

  const double h = grid.h();
  const bool centred = grid.scheme == ImpedanceScheme::Centred;
  op.interface_keeps_residual = centred;
  if (op.minus_interface) op.minus_data_weights.resize(n);
  if (op.plus_interface) op.plus_data_weights.resize(n);
  std::vector<Triplet> entries;
  entries.reserve(5 * op.width * n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = op.first; a <= op.last; ++a) {
      const std::size_t row = op.local_index(a, c);
      const std::size_t g = d.global_index(a, c);
      op.local_to_global[row] = g;
      const bool on_minus = op.minus_interface && a == op.first;
      const bool on_plus = op.plus_interface && a == op.last;
      if (!on_minus && !on_plus) {
        // restriction of the global row; every neighbour is local
        const auto cols = problem.a.row_cols(g);
        const auto vals = problem.a.row_values(g);
        for (std::size_t q = 0; q < cols.size(); ++q) {
          const auto [ca, cc] = frame_of(cols[q]);
          entries.push_back({row, op.local_index(ca, cc), vals[q]});
        }
        continue;
      }
      // The centred row also keeps the physical sides; the one-sided row is
      // the interface condition alone.
      const RobinSides sides =
          centred ? RobinSides{on_minus || a == 0, on_plus || a == n - 1, c == 0, c == n - 1}
                  : RobinSides{on_minus, on_plus, false, false};
      const std::size_t gi = d.axis == Axis::X ? a : c;
      const std::size_t gj = d.axis == Axis::X ? c : a;
      const auto model = impedance_row(grid.scheme, h, grid.k, sides, boundary_row_weight(grid, gi, gj));
      (on_minus ? op.minus_data_weights : op.plus_data_weights)[c] = model.data_weight;
      const auto& r = model.stencil;
      entries.push_back({row, row, r.center});
      auto link = [&](Complex v, std::size_t la, std::size_t lc) {
        if (v != Complex{}) entries.push_back({row, op.local_index(la, lc), v});
      };
      if (a > op.first) link(r.a_minus, a - 1, c);
      if (a < op.last) link(r.a_plus, a + 1, c);
      if (c > 0) link(r.c_minus, a, c - 1);
      if (c + 1 < n) link(r.c_plus, a, c + 1);
    }
  }
  op.local_matrix = CsrMatrix::from_triplets(op.size(), op.size(), std::move(entries));

  if (opts.factorize) {
    // The along-fastest ordering is already the narrow band; skip RCM.
    auto fo = opts.factor;
    fo.allow_reordering = false;
    op.factor = SparseLu::factorize(op.local_matrix, fo);
  }
  return op;
}

std::shared_ptr<const SubdomainSet> build_subdomain_set(const HelmholtzProblem& problem,
                                                        const StripDecomposition& d,
                                                        unsigned threads,
                                                        const SubdomainOptions& opts) {
  auto set = std::make_shared<SubdomainSet>();
  set->decomposition = d;
  set->h = problem.grid.h();
  set->k = problem.grid.k;
  set->subdomains.resize(d.count);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t s = next++; s < d.count; s = next++) {
      try {
        set->subdomains[s] = assemble_subdomain(problem, d, s, opts);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(d.count)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
  return set;
}

}  // namespace mpsweep
