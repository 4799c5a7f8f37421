#include <gtest/gtest.h>

#include <sstream>

#include "mpsweep/bench.hpp"

namespace {

using namespace mpsweep;

TEST(Combo, ParseAndRender) {
  const auto c = parse_combo("LRL+BTB");
  ASSERT_EQ(c.tokens.size(), 2u);
  EXPECT_EQ(c.tokens[0], (SweepKind{Direction::LR, true}));
  EXPECT_EQ(c.tokens[1], (SweepKind{Direction::BT, true}));
  EXPECT_EQ(render_combo(c), "LRL+BTB");
}

TEST(Combo, RoundTripsEveryTokenList) {
  const char* tokens[] = {"LR", "RL", "BT", "TB", "LRL", "BTB"};
  for (const char* a : tokens) {
    EXPECT_EQ(render_combo(parse_combo(a)), a);
    for (const char* b : tokens) {
      for (const char* c : tokens) {
        const std::string text = std::string(a) + "+" + b + "+" + c;
        const auto combo = parse_combo(text);
        EXPECT_EQ(render_combo(combo), text);
        EXPECT_EQ(parse_combo(render_combo(combo)), combo);
      }
    }
  }
}

TEST(Combo, RejectsBadGrammar) {
  for (const char* bad : {"", "+", "LRL+", "+BTB", "LRL++BTB", "XY", "lrl", "LRLR", "RLR"}) {
    EXPECT_THROW((void)parse_combo(bad), ComboError) << '"' << bad << '"';
  }
}

RunRecord sample(std::optional<int> table, double k, int h_exp, std::size_t n, const char* combo, std::size_t it) {
  RunRecord r;
  r.table_id = table;
  r.k = k;
  r.h_exp = h_exp;
  r.n_sub = n;
  r.combo = combo;
  r.iterations = it;
  r.final_rel_residual = 5e-7;
  r.setup_seconds = 1.25;
  r.solve_seconds = 8.31;
  r.matvecs = 2 * it;
  r.prec_applies = 2 * it;
  r.inner_products = 123;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Emit, CsvHeaderOnlyForNoRecords) {
  EXPECT_EQ(kCsvHeader,
            "table,k,h_exp,N,combo,iterations,rel_residual,setup_s,solve_s,matvecs,prec_applies,inner_products");
  EXPECT_EQ(lines(emit({}, OutputFormat::Csv)), std::vector<std::string>{std::string(kCsvHeader)});
}

TEST(Emit, CsvOneRecordInHeaderOrder) {
  const RunRecord r[] = {sample(1, 50, 9, 8, "LRL", 20)};
  const auto out = lines(emit(r, OutputFormat::Csv));
  ASSERT_EQ(out.size(), 2u);
  std::vector<std::string> fields;
  std::istringstream in(out[1]);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  ASSERT_EQ(fields.size(), 12u);
  EXPECT_EQ(fields[0], "1");
  EXPECT_EQ(std::stod(fields[1]), 50.0);
  EXPECT_EQ(fields[2], "9");
  EXPECT_EQ(fields[3], "8");
  EXPECT_EQ(fields[4], "LRL");
  EXPECT_EQ(fields[5], "20");
  EXPECT_EQ(std::stod(fields[6]), 5e-7);
  EXPECT_EQ(std::stod(fields[8]), 8.31);
  EXPECT_EQ(fields[11], "123");
}

TEST(Emit, MarkdownTableOneLayout) {
  std::vector<RunRecord> records;
  const char* combos[] = {"LRL", "LRL+BTB", "LR+RL", "LR+BT+RL+TB"};
  for (const double k : {50.0, 100.0, 200.0}) {
    for (const char* c : combos) records.push_back(sample(1, k, 9, 8, c, 10));
  }
  const auto out = lines(emit(records, OutputFormat::Markdown));
  ASSERT_EQ(out.size(), 5u);
  EXPECT_EQ(out[0], "| k | LRL | LRL+BTB | LR+RL | LR+BT+RL+TB |");
  EXPECT_EQ(out[2].rfind("| 50 |", 0), 0u);
  EXPECT_EQ(out[3].rfind("| 100 |", 0), 0u);
  EXPECT_EQ(out[4].rfind("| 200 |", 0), 0u);
}

TEST(Emit, MarkdownTableFiveShowsSecondsWithOneDecimal) {
  const RunRecord r[] = {sample(5, 50, 9, 4, "LRL", 17)};
  const auto text = emit(r, OutputFormat::Markdown);
  EXPECT_NE(text.find("17 (9.6s)"), std::string::npos) << text;
}

TEST(ExpectedTables, ShapesAndCaptions) {
  EXPECT_EQ(expected_table(1).size(), 12u);
  EXPECT_EQ(expected_table(2).size(), 32u);
  EXPECT_EQ(expected_table(3).size(), 12u);
  EXPECT_EQ(expected_table(4).size(), 12u);
  EXPECT_EQ(expected_table(5).size(), 20u);
  std::size_t t3 = 0;
  for (const auto& c : expected_table(3)) t3 += c.h_exp <= 8;
  EXPECT_EQ(t3, 8u);
  for (int t = 1; t <= 4; ++t) {
    for (const auto& c : expected_table(t)) EXPECT_EQ(c.n_sub, 8u);
  }
  for (const int t : {1, 2, 5}) {
    for (const auto& c : expected_table(t)) EXPECT_EQ(c.h_exp, 9);
  }
  for (const auto& c : expected_table(3)) EXPECT_NEAR(ppwl(GridSpec(c.h_exp, c.k)), 10.0, 1e-12);
  EXPECT_THROW((void)expected_table(6), std::invalid_argument);
}

TEST(ExpectedTables, ToleranceWidensBelowFivePointsPerWavelength) {
  for (const auto& c : expected_table(4)) EXPECT_EQ(c.tolerance, c.h_exp == 5 ? 5 : 3);
  for (const auto& c : expected_table(1)) EXPECT_EQ(c.tolerance, 3);
}

TEST(RunCase, DeterministicHistories) {
  const auto combo = parse_combo("LRL+BTB");
  SolverConfig cfg;
  const auto a = run_case(20.0, 6, 4, combo, cfg);
  const auto b = run_case(20.0, 6, 4, combo, cfg);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.residual_history, b.residual_history);
  EXPECT_TRUE(a.converged);
  EXPECT_LE(a.final_rel_residual, 1e-6 * 10);
  EXPECT_EQ(a.matvecs, 2 * a.iterations);
  EXPECT_EQ(a.combo, "LRL+BTB");
}

TEST(RunCase, SharedContextMatchesFreshRun) {
  CaseContext ctx(30.0, 6, 4);
  SolverConfig cfg;
  const auto lrl = run_case(ctx, parse_combo("LRL"), cfg);
  const auto both = run_case(ctx, parse_combo("LRL+BTB"), cfg);
  EXPECT_EQ(both.residual_history, run_case(30.0, 6, 4, parse_combo("LRL+BTB"), cfg).residual_history);
  EXPECT_GE(both.setup_seconds, lrl.setup_seconds);
}

TEST(RunCase, ConfigurationErrors) {
  SolverConfig cfg;
  // 2 pi / (k h) < 2
  EXPECT_THROW((void)run_case(300.0, 5, 4, parse_combo("LRL"), cfg), std::invalid_argument);
  EXPECT_THROW((void)run_case(20.0, 5, 9, parse_combo("LRL"), cfg), std::invalid_argument);
  EXPECT_THROW((void)run_case(20.0, 5, 2, SweepCombo{}, cfg), ComboError);
}

TEST(RunTable, RestrictedTableFour) {
  TableLimits limits;
  limits.max_h_exp = 6;
  std::size_t seen = 0;
  const auto report = run_table(4, limits, SolverConfig{}, 1, [&](const CellResult&) { ++seen; });
  ASSERT_EQ(report.cells.size(), 4u);
  EXPECT_EQ(seen, 4u);
  for (const auto& c : report.cells) {
    EXPECT_EQ(c.record.table_id, 4);
    EXPECT_EQ(c.pass, cell_within_tolerance(c.expected, c.record));
  }
  EXPECT_NE(verification_report(report).find("k=50"), std::string::npos);
}

TEST(Verify, ToleranceBoundaries) {
  ExpectedCell cell{1, 50, 9, 8, "LRL", 20, 3};
  RunRecord r = sample(1, 50, 9, 8, "LRL", 23);
  r.converged = true;
  EXPECT_TRUE(cell_within_tolerance(cell, r));
  r.iterations = 24;
  EXPECT_FALSE(cell_within_tolerance(cell, r));
  r.iterations = 17;
  EXPECT_TRUE(cell_within_tolerance(cell, r));
  r.iterations = 16;
  EXPECT_FALSE(cell_within_tolerance(cell, r));
}

}  // namespace
