#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "mpsweep/bench.hpp"
#include "mpsweep/csr_matrix.hpp"
#include "mpsweep/helmholtz.hpp"

namespace {

using namespace mpsweep;

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return 1;
  }
  f << text;
  return 0;
}

OutputFormat parse_format(const std::string& s) {
  return s == "md" ? OutputFormat::Markdown : OutputFormat::Csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipreconditioned sweeping solvers for the 2D Helmholtz equation"};
  app.require_subcommand(1);

  double k = 0.0;
  int h_exp = 0;
  std::size_t n_sub = 8;
  std::string sweeps;
  SolverConfig cfg;
  unsigned threads = 1;
  std::string out_path;
  std::string format = "csv";
  std::string scheme = "one-sided";
  const auto scheme_names = CLI::IsMember({"one-sided", "centred"});

  auto* solve = app.add_subcommand("solve", "Solve one configuration");
  solve->add_option("--k", k, "Wavenumber")->required()->check(CLI::PositiveNumber);
  solve->add_option("--h-exp", h_exp, "Mesh spacing h = 2^-h_exp")->required()->check(CLI::Range(2, 12));
  solve->add_option("--n-sub", n_sub, "Number of strips")->required()->check(CLI::PositiveNumber);
  solve->add_option("--sweeps", sweeps, "Sweep combination, e.g. LRL+BTB")->required();
  solve->add_option("--tol", cfg.tol, "Relative residual tolerance")->check(CLI::Range(1e-16, 0.999));
  solve->add_option("--max-it", cfg.max_it, "Iteration cap");
  solve->add_option("--threads", threads, "Threads for concurrent preconditioner application");
  solve->add_option("--out", out_path, "Output file (default stdout)");
  solve->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  solve->add_option("--scheme", scheme, "Impedance discretisation: one-sided or centred")->check(scheme_names);

  int table = 0;
  int max_h_exp = 10;
  bool verify = false;
  auto* bench = app.add_subcommand("bench", "Run one of the benchmark tables");
  bench->add_option("--table", table, "Table id 1..5")->required()->check(CLI::Range(1, 5));
  bench->add_option("--max-h-exp", max_h_exp, "Skip cells with finer meshes");
  bench->add_option("--out", out_path, "Output file (default stdout)");
  bench->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  bench->add_option("--threads", threads, "Threads for concurrent preconditioner application");
  bench->add_flag("--verify", verify, "Compare iteration counts with the reference values");
  bench->add_option("--max-it", cfg.max_it, "Iteration cap");

  std::string matrix_path;
  std::string rhs_path;
  auto* dump = app.add_subcommand("dump", "Write the assembled system");
  dump->add_option("--k", k, "Wavenumber")->required()->check(CLI::PositiveNumber);
  dump->add_option("--h-exp", h_exp, "Mesh spacing h = 2^-h_exp")->required()->check(CLI::Range(1, 12));
  dump->add_option("--matrix", matrix_path, "Matrix Market output");
  dump->add_option("--rhs", rhs_path, "Right-hand side output (re im per line)");
  dump->add_option("--scheme", scheme, "Impedance discretisation: one-sided or centred")->check(scheme_names);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cfg.threads = threads;
  try {
    if (*solve) {
      const auto combo = parse_combo(sweeps);
      auto record = run_case(k, h_exp, n_sub, combo, cfg, threads, parse_scheme(scheme));
      if (record.under_resolved) std::cerr << "warning: fewer than 4 points per wavelength\n";
      if (!record.converged) std::cerr << "warning: no convergence within " << cfg.max_it << " iterations\n";
      if (record.final_rel_residual > 10.0 * cfg.tol) {
        std::cerr << "warning: true relative residual " << record.final_rel_residual << " exceeds 10x tol\n";
      }
      const RunRecord records[] = {record};
      return write_output(emit(records, parse_format(format)), out_path);
    }
    if (*bench) {
      TableLimits limits;
      limits.max_h_exp = max_h_exp;
      const auto report = run_table(table, limits, cfg, threads, [](const CellResult& c) {
        std::cerr << "k=" << c.record.k << " h=2^-" << c.record.h_exp << " N=" << c.record.n_sub << " "
                  << c.record.combo << ": " << c.record.iterations << " iterations\n";
      });
      const auto records = report.records();
      if (int rc = write_output(emit(records, parse_format(format)), out_path); rc != 0) return rc;
      if (verify) {
        std::cerr << verification_report(report);
        return report.all_pass() ? 0 : 2;
      }
      return 0;
    }
    if (*dump) {
      const GridSpec grid(h_exp, k, parse_scheme(scheme));
      const auto problem = make_benchmark_problem(grid);
      if (!matrix_path.empty()) {
        std::ofstream f(matrix_path);
        if (!f) throw std::runtime_error("cannot open " + matrix_path);
        write_matrix_market(f, problem.a);
      }
      if (!rhs_path.empty()) {
        std::ofstream f(rhs_path);
        if (!f) throw std::runtime_error("cannot open " + rhs_path);
        write_vector_text(f, problem.b);
      }
      if (matrix_path.empty() && rhs_path.empty()) write_matrix_market(std::cout, problem.a);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
