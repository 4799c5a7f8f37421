#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsweep/helmholtz.hpp"
#include "mpsweep/mpgmres.hpp"
#include "mpsweep/strip_decomposition.hpp"
#include "mpsweep/sweep.hpp"

namespace mpsweep {

/// Ordered sweep tokens joined by '+', e.g. "LRL+BTB".
struct SweepCombo {
  std::vector<SweepKind> tokens;
  bool operator==(const SweepCombo&) const = default;
};

class ComboError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Accepts LR, RL, BT, TB, LRL and BTB.
SweepCombo parse_combo(std::string_view text);
std::string render_combo(const SweepCombo& combo);

struct RunRecord {
  std::optional<int> table_id;
  double k = 0.0;
  int h_exp = 0;
  std::size_t n_sub = 0;
  std::string combo;
  std::size_t iterations = 0;
  double final_rel_residual = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::size_t matvecs = 0;
  std::size_t prec_applies = 0;
  std::size_t inner_products = 0;
  bool converged = false;
  bool exhausted = false;
  /// Fewer than 4 points per wavelength.
  bool under_resolved = false;
  std::vector<double> residual_history;
};

/// One (k, h_exp, N) problem; decompositions are assembled and factored on
/// first use and shared by every combo run against it.
class CaseContext {
 public:
  CaseContext(double k, int h_exp, std::size_t n_sub, unsigned threads = 1,
              ImpedanceScheme scheme = ImpedanceScheme::OneSided);

  const HelmholtzProblem& problem() const { return problem_; }
  double k() const { return problem_.grid.k; }
  int h_exp() const { return problem_.grid.h_exp; }
  std::size_t n_sub() const { return n_sub_; }

  std::shared_ptr<const SubdomainSet> subdomains(Axis axis);
  /// Assembly plus factorisation time of the axes a combo uses.
  double setup_seconds(const SweepCombo& combo) const;

 private:
  HelmholtzProblem problem_;
  std::size_t n_sub_;
  unsigned threads_;
  double assembly_seconds_ = 0.0;
  std::shared_ptr<const SubdomainSet> sets_[2];
  double factor_seconds_[2] = {0.0, 0.0};
};

/// Solves with one sweep preconditioner per token: standard GMRES for a
/// single token, selective MPGMRES otherwise.
RunRecord run_case(CaseContext& ctx, const SweepCombo& combo, const SolverConfig& cfg);
RunRecord run_case(double k, int h_exp, std::size_t n_sub, const SweepCombo& combo,
                   const SolverConfig& cfg, unsigned threads = 1,
                   ImpedanceScheme scheme = ImpedanceScheme::OneSided);

/// Reference iteration count for one cell of the benchmark tables.
struct ExpectedCell {
  int table = 0;
  double k = 0.0;
  int h_exp = 0;
  std::size_t n_sub = 0;
  std::string combo;
  int iterations = 0;
  int tolerance = 3;
};

/// Cells of tables 1..5 in layout order.
const std::vector<ExpectedCell>& expected_table(int table_id);

struct TableLimits {
  int max_h_exp = 10;
  double max_k = std::numeric_limits<double>::infinity();
  std::size_t max_n_sub = std::numeric_limits<std::size_t>::max();
};

struct CellResult {
  ExpectedCell expected;
  RunRecord record;
  bool pass = false;
};

struct TableReport {
  int table = 0;
  std::vector<CellResult> cells;
  bool all_pass() const;
  std::vector<RunRecord> records() const;
};

bool cell_within_tolerance(const ExpectedCell& cell, const RunRecord& record);

TableReport run_table(int table_id, const TableLimits& limits, const SolverConfig& cfg,
                      unsigned threads = 1,
                      const std::function<void(const CellResult&)>& on_cell = {});

enum class OutputFormat { Csv, Markdown };

inline constexpr std::string_view kCsvHeader =
    "table,k,h_exp,N,combo,iterations,rel_residual,setup_s,solve_s,matvecs,prec_applies,inner_products";

std::string emit(std::span<const RunRecord> records, OutputFormat format);
std::string emit_csv(std::span<const RunRecord> records);
/// Lays records out like the benchmark tables when they all share one table id.
std::string emit_markdown(std::span<const RunRecord> records);
std::string verification_report(const TableReport& report);

}  // namespace mpsweep
