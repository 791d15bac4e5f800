#include <gtest/gtest.h>

#include <sstream>

#include "trustsched/experiments.hpp"
#include "trustsched/incentive.hpp"

namespace trustsched {
namespace {

TEST(FormatNumber, SixSignificantDigits) {
  EXPECT_EQ(format_number(8.912345678), "8.91235");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1234567.0), "1.23457e+06");
}

TEST(ErrorRateGrid, Endpoints) {
  const auto family = find_preset("fig-1").family();
  const auto xs = error_rate_grid(family, 0.005);
  ASSERT_EQ(xs.size(), 201u);
  EXPECT_EQ(xs.front(), 0.0);
  EXPECT_EQ(xs.back(), 1.0);
  EXPECT_NEAR(xs[66], 0.33, 1e-15);
  const auto grid = SizeGrid::create({1.0});
  const SizeFamily single{grid, {1.0}, 0.5};
  EXPECT_EQ(error_rate_grid(single, 0.1), std::vector<double>{0.0});
}

TEST(Sweep, CsvRoundTrip) {
  const auto family = find_preset("fig-1").family();
  const auto rows = sweep_region(family, 0.25, 0.1);
  ASSERT_EQ(rows.size(), 5u * 11u);
  std::stringstream csv;
  write_sweep_csv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kSweepHeader);
  const auto back = read_sweep_csv(csv);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    EXPECT_NEAR(back[r].x, rows[r].x, 1e-12);
    EXPECT_NEAR(back[r].b, rows[r].b, 1e-12);
    EXPECT_EQ(back[r].ic_mt, rows[r].ic_mt);
    EXPECT_EQ(back[r].ic_bt, rows[r].ic_bt);
    EXPECT_NEAR(*back[r].et_mt, *rows[r].et_mt, 1e-5 * *rows[r].et_mt);
  }
}

TEST(Sweep, RowsMatchIcCheck) {
  const auto family = find_preset("fig-1").family();
  const auto rows = sweep_region(family, 0.1, 0.05);
  for (const auto& row : rows) {
    const auto config = family.at(row.x);
    EXPECT_EQ(row.ic_mt, ic_check(config, TrustKind::MeasuredTrust, row.b).compatible);
    EXPECT_EQ(row.ic_bt, ic_check(config, TrustKind::BlindTrust, row.b).compatible);
    EXPECT_NEAR(*row.et_bt, trust_overall_mean_response(config, TrustKind::BlindTrust, row.b),
                1e-12);
  }
  for (const auto count : ic_run_counts(rows, TrustKind::MeasuredTrust)) EXPECT_LE(count, 1u);
}

TEST(Sweep, ExactEstimatesAreAlwaysCompatibleUnderMt) {
  const auto family = find_preset("fig-1").family();
  for (double b : {0.0, 0.3, 1.0}) {
    EXPECT_TRUE(ic_check(family.at(0.0), TrustKind::MeasuredTrust, b).compatible);
  }
}

TEST(Frontier, FromHandMadeRows) {
  std::vector<SweepRow> rows;
  for (double x : {0.0, 0.1, 0.2}) {
    for (double b : {0.0, 0.5, 1.0}) {
      SweepRow r;
      r.x = x;
      r.b = b;
      r.ic_mt = x < 0.15 && b >= 0.5;
      r.ic_bt = x == 0.0 && b != 0.5;
      rows.push_back(r);
    }
  }
  const auto mt = feasibility_frontier(rows, TrustKind::MeasuredTrust);
  ASSERT_TRUE(mt);
  EXPECT_EQ(mt->x, 0.1);
  EXPECT_EQ(mt->b_lo, 0.5);
  EXPECT_EQ(mt->b_hi, 1.0);
  EXPECT_EQ(mt->b_mid(), 0.75);
  EXPECT_EQ(ic_run_counts(rows, TrustKind::BlindTrust), (std::vector<std::size_t>{2, 0, 0}));
  for (auto& r : rows) r.ic_mt = false;
  EXPECT_FALSE(feasibility_frontier(rows, TrustKind::MeasuredTrust));
}

TEST(Curve, BestPunishmentIsMinimalOverRegion) {
  const auto family = find_preset("fig-1").family();
  for (double x : {0.05, 0.1, 0.2}) {
    const auto config = family.at(x);
    for (const auto kind : {TrustKind::MeasuredTrust, TrustKind::BlindTrust}) {
      const auto best = best_punishment(config, kind, 0.01);
      const auto region = ic_region(config, kind, {0.01, 1e-9, 1e-9});
      ASSERT_EQ(best.has_value(), !region.empty());
      if (!best) continue;
      EXPECT_TRUE(region.contains(best->b));
      EXPECT_GE(ic_margin(config, kind, best->b), -1e-6);
      for (int s = 0; s <= 100; ++s) {
        const double b = s * 0.01;
        if (!region.contains(b)) continue;
        EXPECT_LE(best->mean_response, trust_overall_mean_response(config, kind, b) + 1e-12);
      }
    }
  }
}

TEST(Curve, CsvRoundTripAndBaselines) {
  const auto family = find_preset("fig-1").family();
  const auto rows = optimal_b_curve(family, 0.25, 0.05);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.et_fcfs, 4.68, 1e-12);
    EXPECT_NEAR(r.et_scf, 3.6628456510809473, 1e-9);
    EXPECT_EQ(r.best_b_mt.has_value(), r.et_mt.has_value());
  }
  ASSERT_TRUE(rows[0].et_mt);
  // Exact estimates: MT is SRPT-like and beats SCF.
  EXPECT_LT(*rows[0].et_mt, rows[0].et_scf);

  std::stringstream csv;
  write_curve_csv(csv, rows);
  const std::string text = csv.str();
  EXPECT_EQ(text.front(), '#');
  EXPECT_NE(text.find(std::string("\n") + kCurveHeader + "\n"), std::string::npos);
  const auto back = read_curve_csv(csv);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    EXPECT_EQ(back[r].best_b_bt.has_value(), rows[r].best_b_bt.has_value());
    EXPECT_NEAR(back[r].x, rows[r].x, 1e-12);
  }
}

TEST(CsvReaders, RejectMalformedInput) {
  std::istringstream bad_header("x,y\n0,1\n");
  EXPECT_THROW(read_sweep_csv(bad_header), ModelError);
  std::istringstream bad_row(std::string(kSweepHeader) + "\n0,0.5,1\n");
  EXPECT_THROW(read_sweep_csv(bad_row), ModelError);
  std::istringstream bad_number(std::string(kCurveHeader) + "\n0,abc,,,,4.68,3.6\n");
  EXPECT_THROW(read_curve_csv(bad_number), ModelError);
}

TEST(Presets, Catalogue) {
  const auto names = {"example-3-1", "fig-1", "footnote-5"};
  for (const auto* name : names) EXPECT_EQ(find_preset(name).name, name);
  const auto fig = find_preset("fig-1").config();
  EXPECT_NEAR(fig.load(), 0.8, 1e-12);
  const auto foot = find_preset("footnote-5").family().at(0.0);
  EXPECT_NEAR(foot.mean_size(), 1.001, 1e-12);
}

}  // namespace
}  // namespace trustsched
