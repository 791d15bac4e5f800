#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "trustsched/experiments.hpp"
#include "trustsched/incentive.hpp"

namespace trustsched {
namespace {

constexpr auto MT = TrustKind::MeasuredTrust;
constexpr auto BT = TrustKind::BlindTrust;

TEST(IcCheck, ExampleViolationsAtSmallPunishment) {
  const auto config = preset_example_3_1();
  const auto mt = ic_check(config, MT, 0.05);
  EXPECT_FALSE(mt.compatible);
  ASSERT_EQ(mt.violations.size(), 1u);
  EXPECT_EQ(mt.violations[0].estimate, 2u);
  EXPECT_EQ(mt.violations[0].declared, 1u);
  EXPECT_LT(mt.violations[0].delta, 0.0);

  const auto bt = ic_check(config, BT, 0.05);
  EXPECT_FALSE(bt.compatible);
  for (const auto& v : bt.violations) EXPECT_EQ(v.estimate, 2u);
}

TEST(IcCheck, ExampleViolationAtLargePunishment) {
  const auto report = ic_check(preset_example_3_1(), MT, 0.5);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].estimate, 0u);
  EXPECT_EQ(report.violations[0].declared, 1u);
}

TEST(IcCheck, DeltaShapeAndMargin) {
  const auto config = preset_example_3_1();
  const auto report = ic_check(config, MT, 0.1);
  EXPECT_TRUE(report.compatible);
  double min_delta = INFINITY;
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_FALSE(report.delta[j][j]);
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == j) continue;
      ASSERT_TRUE(report.delta[j][k]);
      EXPECT_NEAR(*report.delta[j][k], pair_delta(config, MT, j, k, 0.1), 1e-9);
      min_delta = std::min(min_delta, *report.delta[j][k]);
    }
  }
  EXPECT_NEAR(ic_margin(config, MT, 0.1), min_delta, 1e-12);
}

TEST(IcCheck, ZeroProbabilityEstimatesAreExcluded) {
  const auto grid = SizeGrid::create({1, 2, 3});
  const auto matrix = SizeEstimateMatrix::create({{0.5, 0.0, 0.1}, {0.1, 0.0, 0.1}, {0.0, 0.0, 0.2}});
  const SystemConfig config(0.3, grid, matrix);
  const auto report = ic_check(config, MT, 0.5);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_FALSE(report.delta[1][k]);
  try {
    pair_delta(config, MT, 1, 0, 0.5);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndefinedColumn);
  }
  EXPECT_THROW(pair_threshold(config, MT, 1, 2), ModelError);
  EXPECT_THROW(pair_delta(config, MT, 5, 0, 0.5), ModelError);
}

TEST(IcCheck, SingleClassHasNoPairs) {
  const auto grid = SizeGrid::create({2.0});
  const SystemConfig config(0.3, grid, diagonal_matrix(std::vector{1.0}, grid));
  EXPECT_TRUE(std::isinf(ic_margin(config, MT, 0.5)));
  const auto region = ic_region(config, BT);
  ASSERT_EQ(region.intervals.size(), 1u);
  EXPECT_EQ(region.intervals[0].lo, 0.0);
  EXPECT_EQ(region.intervals[0].hi, 1.0);
  const auto benefit = social_benefit_region(config, MT, Baseline::Fcfs);
  ASSERT_EQ(benefit.intervals.size(), 1u);
  EXPECT_EQ(benefit.intervals[0].lo, 0.0);
  EXPECT_EQ(benefit.intervals[0].hi, 1.0);
}

TEST(PairThreshold, MeasuredTrustSingleRootInExample) {
  const auto config = preset_example_3_1();
  const auto roots = pair_threshold(config, MT, 2, 1, {1e-12, 1e-3});
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0], 0.05304198530224283, 1e-9);
  const auto upper = pair_threshold(config, MT, 0, 1, {1e-12, 1e-3});
  ASSERT_EQ(upper.size(), 1u);
  EXPECT_NEAR(upper[0], 0.21182327648283192, 1e-9);
  EXPECT_NEAR(pair_delta(config, MT, 0, 1, upper[0]), 0.0, 1e-9);
}

TEST(PairThreshold, DiagonalOverestimatesNeverPay) {
  // Exact estimates: overestimating can only hurt, so no root.
  const auto config = find_preset("fig-1").family().at(0.0);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = j + 1; k < 4; ++k) {
      EXPECT_TRUE(pair_threshold(config, MT, j, k).empty());
      for (double b : {0.0, 0.5, 1.0}) EXPECT_GT(pair_delta(config, MT, j, k, b), 0.0);
    }
  }
}

TEST(PairThreshold, BlindTrustRootsAreZeros) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto config = testing::random_config(rng, 2, 3);
    for (std::size_t j = 0; j < config.n(); ++j) {
      if (config.matrix().estimate_marginal(j) <= 0) continue;
      for (std::size_t k = 0; k < config.n(); ++k) {
        if (k == j) continue;
        for (double r : pair_threshold(config, BT, j, k, {1e-10, 0.01})) {
          EXPECT_NEAR(pair_delta(config, BT, j, k, r), 0.0, 1e-6);
        }
      }
    }
  }
}

TEST(IcRegion, ExampleMeasuredTrust) {
  const auto region = ic_region(preset_example_3_1(), MT, {1e-3, 1e-10, 1e-9});
  ASSERT_EQ(region.intervals.size(), 1u);
  EXPECT_NEAR(region.intervals[0].lo, 0.05304198530224283, 1e-7);
  EXPECT_NEAR(region.intervals[0].hi, 0.21182327648283192, 1e-7);
  EXPECT_TRUE(region.contains(0.1));
  EXPECT_FALSE(region.contains(0.3));
}

TEST(IcRegion, ExampleBlindTrustIsNarrow) {
  // Too narrow for a 0.01 scan to see.
  const auto region = ic_region(preset_example_3_1(), BT, {1e-3, 1e-12, 1e-9});
  ASSERT_EQ(region.intervals.size(), 1u);
  EXPECT_NEAR(region.intervals[0].lo, 0.2842507018756101, 1e-9);
  EXPECT_NEAR(region.intervals[0].hi, 0.2867427902299004, 1e-9);
  EXPECT_TRUE(ic_region(preset_example_3_1(), BT, {1e-2, 1e-9, 1e-9}).empty());
}

TEST(IcRegion, AgreesWithPointwiseCheck) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto config = testing::random_config(rng);
    for (const auto kind : {MT, BT}) {
      const auto region = ic_region(config, kind, {0.01, 1e-9, 1e-9});
      for (int step = 0; step <= 100; ++step) {
        const double b = step * 0.01;
        // Skip points within bisection tolerance of an endpoint.
        bool near_edge = false;
        for (const auto& iv : region.intervals) {
          near_edge |= std::abs(b - iv.lo) < 1e-6 || std::abs(b - iv.hi) < 1e-6;
        }
        if (near_edge) continue;
        EXPECT_EQ(region.contains(b), ic_margin(config, kind, b) >= -1e-9)
            << to_string(kind) << " b=" << b;
      }
    }
  }
}

TEST(IcRegion, MeasuredTrustIsSingleIntervalAndIntersectionOfPairs) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto config = testing::random_config(rng);
    const auto region = ic_region(config, MT);
    EXPECT_LE(region.intervals.size(), 1u);

    int runs = 0;
    bool prev = false;
    for (int step = 0; step <= 1000; ++step) {
      const bool ok = ic_check(config, MT, step * 1e-3).compatible;
      if (ok && !prev) ++runs;
      prev = ok;
    }
    EXPECT_LE(runs, 1);

    // Per-pair single crossing.
    for (std::size_t j = 0; j < config.n(); ++j) {
      if (config.matrix().estimate_marginal(j) <= 0) continue;
      for (std::size_t k = 0; k < config.n(); ++k) {
        if (k == j) continue;
        int changes = 0;
        double last = pair_delta(config, MT, j, k, 0.0);
        for (int step = 1; step <= 100; ++step) {
          const double d = pair_delta(config, MT, j, k, step * 0.01);
          if ((d < 0) != (last < 0)) ++changes;
          last = d;
        }
        EXPECT_LE(changes, 1);
      }
    }
  }
}

TEST(SocialBenefit, ExampleAgainstFcfs) {
  const auto config = preset_example_3_1();
  const double fcfs = baseline_mean_response(config, Baseline::Fcfs);
  const auto region = social_benefit_region(config, MT, Baseline::Fcfs);
  ASSERT_FALSE(region.empty());
  for (const auto& iv : region.intervals) {
    EXPECT_LE(trust_overall_mean_response(config, MT, 0.5 * (iv.lo + iv.hi)), fcfs);
  }
  EXPECT_NEAR(region.intervals.front().lo, 0.0, 1e-12);
  EXPECT_TRUE(social_benefit_region(config, MT, Baseline::Scf).contains(0.5));
}

TEST(ScanRegion, FindsDisjointIntervals) {
  const auto set = scan_region([](double b) { return std::sin(20.0 * b); },
                               RegionOptions{1e-3, 1e-10, 0.0});
  ASSERT_EQ(set.intervals.size(), 4u);
  EXPECT_NEAR(set.intervals[1].lo, M_PI / 10, 1e-9);
  EXPECT_NEAR(set.intervals[1].hi, 3 * M_PI / 20, 1e-9);
  EXPECT_NEAR(set.measure(), M_PI / 20 * 3 + (1.0 - 6 * M_PI / 20), 1e-8);
}

}  // namespace
}  // namespace trustsched
