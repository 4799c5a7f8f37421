#include "mpsweep/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace mpsweep {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string display_k(double k) {
  return std::abs(k - std::round(k)) < 1e-9 ? format_fixed(k, 0) : format_fixed(k, 1);
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string row_line(const std::vector<std::string>& cells) {
  std::string s = "|";
  for (const auto& c : cells) s += " " + c + " |";
  return s + "\n";
}

std::string separator(std::size_t n) {
  std::string s = "|";
  for (std::size_t i = 0; i < n; ++i) s += "---|";
  return s + "\n";
}

std::vector<ExpectedCell> build_table(int id) {
  std::vector<ExpectedCell> cells;
  auto add = [&](double k, int h_exp, std::size_t n, const char* combo, int it) {
    cells.push_back({id, k, h_exp, n, combo, it, 3});
  };
  switch (id) {
    case 1: {
      const double ks[] = {50, 100, 200};
      const int lrl[] = {20, 18, 17};
      const int lrl_btb[] = {9, 8, 9};
      const int lr_rl[] = {31, 29, 31};
      const int four[] = {18, 18, 18};
      for (int r = 0; r < 3; ++r) {
        add(ks[r], 9, 8, "LRL", lrl[r]);
        add(ks[r], 9, 8, "LRL+BTB", lrl_btb[r]);
        add(ks[r], 9, 8, "LR+RL", lr_rl[r]);
        add(ks[r], 9, 8, "LR+BT+RL+TB", four[r]);
      }
      break;
    }
    case 2: {
      const int lrl[] = {20, 18, 18, 17, 17, 18, 18, 18, 19, 20, 21, 23, 23, 26, 27, 29};
      const int lrl_btb[] = {9, 8, 8, 9, 9, 10, 10, 11, 13, 13, 14, 16, 17, 19, 22, 27};
      for (int c = 0; c < 16; ++c) {
        const double k = 40.0 * (c + 1);
        add(k, 9, 8, "LRL", lrl[c]);
        add(k, 9, 8, "LRL+BTB", lrl_btb[c]);
      }
      break;
    }
    case 3: {
      const int lrl[] = {8, 10, 12, 15, 19, 22};
      const int lrl_btb[] = {8, 10, 10, 11, 11, 12};
      for (int c = 0; c < 6; ++c) {
        const int h_exp = 5 + c;
        const double k = k_for_ppwl(h_exp, 10.0);
        add(k, h_exp, 8, "LRL", lrl[c]);
        add(k, h_exp, 8, "LRL+BTB", lrl_btb[c]);
      }
      break;
    }
    case 4: {
      const int lrl[] = {21, 10, 12, 15, 20, 24};
      const int lrl_btb[] = {25, 10, 8, 8, 9, 10};
      for (int c = 0; c < 6; ++c) {
        add(50.0, 5 + c, 8, "LRL", lrl[c]);
        add(50.0, 5 + c, 8, "LRL+BTB", lrl_btb[c]);
      }
      break;
    }
    case 5: {
      const std::size_t ns[] = {4, 8, 16, 32, 64};
      const int lrl[2][5] = {{17, 20, 24, 37, 60}, {16, 18, 22, 33, 52}};
      const int lrl_btb[2][5] = {{8, 9, 10, 13, 15}, {7, 8, 10, 13, 19}};
      const double ks[] = {50, 100};
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 5; ++c) {
          add(ks[r], 9, ns[c], "LRL", lrl[r][c]);
          add(ks[r], 9, ns[c], "LRL+BTB", lrl_btb[r][c]);
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("expected_table: table id must be 1..5");
  }
  for (auto& c : cells) {
    if (ppwl(GridSpec(c.h_exp, c.k)) < 5.0) c.tolerance = 5;
  }
  return cells;
}

}  // namespace

SweepCombo parse_combo(std::string_view text) {
  SweepCombo combo;
  std::size_t pos = 0;
  while (true) {
    const auto plus = text.find('+', pos);
    const auto tok = text.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos);
    if (tok == "LR") combo.tokens.push_back({Direction::LR, false});
    else if (tok == "RL") combo.tokens.push_back({Direction::RL, false});
    else if (tok == "BT") combo.tokens.push_back({Direction::BT, false});
    else if (tok == "TB") combo.tokens.push_back({Direction::TB, false});
    else if (tok == "LRL") combo.tokens.push_back({Direction::LR, true});
    else if (tok == "BTB") combo.tokens.push_back({Direction::BT, true});
    else throw ComboError("unknown sweep token '" + std::string(tok) + "' in '" + std::string(text) + "'");
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  return combo;
}

std::string render_combo(const SweepCombo& combo) {
  std::string s;
  for (const auto& t : combo.tokens) {
    if (!s.empty()) s += '+';
    s += t.name();
  }
  return s;
}

CaseContext::CaseContext(double k, int h_exp, std::size_t n_sub, unsigned threads,
                         ImpedanceScheme scheme)
    : n_sub_(n_sub), threads_(threads) {
  const auto t0 = Clock::now();
  problem_ = make_benchmark_problem(GridSpec(h_exp, k, scheme));
  assembly_seconds_ = seconds_since(t0);
  // validate N early so a bad configuration fails before any factorisation
  (void)build_strips(problem_.grid, Axis::X, n_sub_);
}

std::shared_ptr<const SubdomainSet> CaseContext::subdomains(Axis axis) {
  const int a = axis == Axis::X ? 0 : 1;
  if (!sets_[a]) {
    const auto t0 = Clock::now();
    sets_[a] = build_subdomain_set(problem_, build_strips(problem_.grid, axis, n_sub_), threads_);
    factor_seconds_[a] = seconds_since(t0);
  }
  return sets_[a];
}

double CaseContext::setup_seconds(const SweepCombo& combo) const {
  bool used[2] = {false, false};
  for (const auto& t : combo.tokens) used[t.axis() == Axis::X ? 0 : 1] = true;
  return assembly_seconds_ + (used[0] ? factor_seconds_[0] : 0.0) + (used[1] ? factor_seconds_[1] : 0.0);
}

RunRecord run_case(CaseContext& ctx, const SweepCombo& combo, const SolverConfig& cfg) {
  if (combo.tokens.empty()) throw ComboError("run_case: empty sweep combination");
  const double points = ppwl(ctx.problem().grid);
  if (points < 2.0) {
    throw std::invalid_argument("run_case: " + format_double(points, 3) +
                                " points per wavelength is below the minimum of 2");
  }
  std::vector<SweepPreconditioner> precs;
  precs.reserve(combo.tokens.size());
  for (const auto& t : combo.tokens) precs.emplace_back(t, ctx.subdomains(t.axis()));
  std::vector<const LinearOperator*> ops;
  for (const auto& p : precs) ops.push_back(&p);

  SolverConfig c = cfg;
  c.variant = ops.size() == 1 ? Variant::Standard : Variant::Selective;
  const MatrixOperator a(ctx.problem().a);
  const auto res = mpgmres(a, ops, ctx.problem().b, c);

  RunRecord r;
  r.k = ctx.k();
  r.h_exp = ctx.h_exp();
  r.n_sub = ctx.n_sub();
  r.combo = render_combo(combo);
  r.iterations = res.stats.iterations;
  r.final_rel_residual = res.stats.final_rel_residual;
  r.setup_seconds = ctx.setup_seconds(combo);
  r.solve_seconds = res.stats.solve_seconds;
  r.matvecs = res.stats.matvecs;
  r.prec_applies = res.stats.prec_applies;
  r.inner_products = res.stats.inner_products;
  r.converged = res.stats.converged;
  r.exhausted = res.stats.exhausted;
  r.under_resolved = points < 4.0;
  r.residual_history = res.stats.residual_history;
  return r;
}

RunRecord run_case(double k, int h_exp, std::size_t n_sub, const SweepCombo& combo,
                   const SolverConfig& cfg, unsigned threads, ImpedanceScheme scheme) {
  CaseContext ctx(k, h_exp, n_sub, threads, scheme);
  return run_case(ctx, combo, cfg);
}

const std::vector<ExpectedCell>& expected_table(int table_id) {
  static const std::vector<ExpectedCell> tables[5] = {build_table(1), build_table(2), build_table(3),
                                                      build_table(4), build_table(5)};
  if (table_id < 1 || table_id > 5) throw std::invalid_argument("expected_table: table id must be 1..5");
  return tables[table_id - 1];
}

bool cell_within_tolerance(const ExpectedCell& cell, const RunRecord& record) {
  if (!record.converged) return false;
  const long diff = static_cast<long>(record.iterations) - cell.iterations;
  return std::labs(diff) <= cell.tolerance;
}

bool TableReport::all_pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.pass; });
}

std::vector<RunRecord> TableReport::records() const {
  std::vector<RunRecord> out;
  for (const auto& c : cells) out.push_back(c.record);
  return out;
}

TableReport run_table(int table_id, const TableLimits& limits, const SolverConfig& cfg, unsigned threads,
                      const std::function<void(const CellResult&)>& on_cell) {
  TableReport report;
  report.table = table_id;
  std::vector<ExpectedCell> selected;
  for (const auto& c : expected_table(table_id)) {
    if (c.h_exp <= limits.max_h_exp && c.k <= limits.max_k && c.n_sub <= limits.max_n_sub) selected.push_back(c);
  }
  // Cells sharing (k, h, N) reuse one factored context.
  std::vector<bool> done(selected.size(), false);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (done[i]) continue;
    CaseContext ctx(selected[i].k, selected[i].h_exp, selected[i].n_sub, threads);
    for (std::size_t j = i; j < selected.size(); ++j) {
      if (done[j] || selected[j].k != selected[i].k || selected[j].h_exp != selected[i].h_exp ||
          selected[j].n_sub != selected[i].n_sub) {
        continue;
      }
      done[j] = true;
      CellResult cell{selected[j], run_case(ctx, parse_combo(selected[j].combo), cfg), false};
      cell.record.table_id = table_id;
      cell.pass = cell_within_tolerance(cell.expected, cell.record);
      if (on_cell) on_cell(cell);
      report.cells.push_back(std::move(cell));
    }
  }
  // restore layout order
  std::vector<CellResult> ordered;
  for (const auto& c : selected) {
    for (auto& r : report.cells) {
      if (r.expected.k == c.k && r.expected.h_exp == c.h_exp && r.expected.n_sub == c.n_sub &&
          r.expected.combo == c.combo) {
        ordered.push_back(r);
        break;
      }
    }
  }
  report.cells = std::move(ordered);
  return report;
}

std::string emit_csv(std::span<const RunRecord> records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  const int digits = std::numeric_limits<double>::max_digits10;
  for (const auto& r : records) {
    out << (r.table_id ? std::to_string(*r.table_id) : std::string()) << ',' << format_double(r.k, digits)
        << ',' << r.h_exp << ',' << r.n_sub << ',' << r.combo << ',' << r.iterations << ','
        << format_double(r.final_rel_residual, digits) << ',' << format_double(r.setup_seconds, digits) << ','
        << format_double(r.solve_seconds, digits) << ',' << r.matvecs << ',' << r.prec_applies << ','
        << r.inner_products << '\n';
  }
  return out.str();
}

std::string emit_markdown(std::span<const RunRecord> records) {
  // 0 when the records do not all come from one table
  int table = records.empty() ? 0 : records.front().table_id.value_or(0);
  for (const auto& r : records) {
    if (r.table_id.value_or(0) != table) table = 0;
  }

  std::vector<std::string> combos;
  for (const auto& r : records) push_unique(combos, r.combo);
  auto find = [&](auto pred) -> const RunRecord* {
    for (const auto& r : records) {
      if (pred(r)) return &r;
    }
    return nullptr;
  };
  auto its = [](const RunRecord* r) { return r ? std::to_string(r->iterations) : std::string("-"); };

  std::string out;
  if (table == 1) {
    std::vector<double> ks;
    for (const auto& r : records) push_unique(ks, r.k);
    std::vector<std::string> head{"k"};
    head.insert(head.end(), combos.begin(), combos.end());
    out += row_line(head) + separator(head.size());
    for (const double k : ks) {
      std::vector<std::string> row{display_k(k)};
      for (const auto& c : combos) row.push_back(its(find([&](const RunRecord& r) { return r.k == k && r.combo == c; })));
      out += row_line(row);
    }
  } else if (table == 2 || table == 3 || table == 4) {
    // one column per k (table 2) or per mesh (tables 3, 4)
    std::vector<std::pair<double, int>> columns;
    for (const auto& r : records) push_unique(columns, std::pair{r.k, r.h_exp});
    std::vector<std::string> head{table == 2 ? "k" : "h"};
    for (const auto& [k, e] : columns) head.push_back(table == 2 ? display_k(k) : "2^-" + std::to_string(e));
    out += row_line(head) + separator(head.size());
    if (table == 3) {
      std::vector<std::string> krow{"k"};
      for (const auto& col : columns) krow.push_back(format_fixed(col.first, 1));
      out += row_line(krow);
    }
    for (const auto& c : combos) {
      std::vector<std::string> row{c};
      for (const auto& [k, e] : columns) {
        row.push_back(its(find([&](const RunRecord& r) { return r.k == k && r.h_exp == e && r.combo == c; })));
      }
      out += row_line(row);
    }
  } else if (table == 5) {
    std::vector<double> ks;
    std::vector<std::size_t> ns;
    for (const auto& r : records) {
      push_unique(ks, r.k);
      push_unique(ns, r.n_sub);
    }
    for (const double k : ks) {
      std::vector<std::string> head{"k=" + display_k(k)};
      for (const auto n : ns) head.push_back("N=" + std::to_string(n));
      out += row_line(head) + separator(head.size());
      for (const auto& c : combos) {
        std::vector<std::string> row{c};
        for (const auto n : ns) {
          const auto* r = find([&](const RunRecord& x) { return x.k == k && x.n_sub == n && x.combo == c; });
          row.push_back(r ? std::to_string(r->iterations) + " (" +
                                format_fixed(r->setup_seconds + r->solve_seconds, 1) + "s)"
                          : std::string("-"));
        }
        out += row_line(row);
      }
      out += "\n";
    }
  } else {
    const std::vector<std::string> head{"k", "h", "N", "combo", "iterations", "rel. residual", "setup", "solve"};
    out += row_line(head) + separator(head.size());
    for (const auto& r : records) {
      out += row_line({display_k(r.k), "2^-" + std::to_string(r.h_exp), std::to_string(r.n_sub), r.combo,
                       std::to_string(r.iterations), format_double(r.final_rel_residual, 3),
                       format_fixed(r.setup_seconds, 1) + "s", format_fixed(r.solve_seconds, 1) + "s"});
    }
  }
  return out;
}

std::string emit(std::span<const RunRecord> records, OutputFormat format) {
  return format == OutputFormat::Csv ? emit_csv(records) : emit_markdown(records);
}

std::string verification_report(const TableReport& report) {
  std::ostringstream out;
  for (const auto& c : report.cells) {
    out << (c.pass ? "PASS" : "FAIL") << "  table " << report.table << "  k=" << display_k(c.expected.k)
        << " h=2^-" << c.expected.h_exp << " N=" << c.expected.n_sub << " " << c.expected.combo
        << ": iterations " << c.record.iterations << ", expected " << c.expected.iterations << " +/- "
        << c.expected.tolerance << (c.record.converged ? "" : " (not converged)") << '\n';
  }
  out << (report.all_pass() ? "all cells within tolerance" : "some cells out of tolerance") << '\n';
  return out.str();
}

}  // namespace mpsweep
