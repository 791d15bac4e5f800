#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "trustsched/experiments.hpp"
#include "trustsched/simulator.hpp"
#include "trustsched/soap.hpp"

namespace trustsched {
namespace {

SimConfig small_sim(std::uint64_t jobs = 200'000, std::size_t reps = 4) {
  SimConfig sim;
  sim.job_count = jobs;
  sim.replications = reps;
  sim.seed = 42;
  return sim;
}

TEST(RankBoundaries, Examples) {
  const auto grid = SizeGrid::create({1, 2, 3});
  using PK = PolicyKind;
  EXPECT_TRUE(rank_boundaries(grid, PK::Fcfs, 0, false).empty());
  EXPECT_EQ(initial_rank(grid, PK::Fcfs, 2), 1u);

  const auto scf = rank_boundaries(grid, PK::Scf, 0, false);
  ASSERT_EQ(scf.size(), 2u);
  EXPECT_EQ(scf[0].age, 1.0);
  EXPECT_EQ(scf[0].rank, 2u);
  EXPECT_EQ(scf[1].age, 2.0);
  EXPECT_EQ(scf[1].rank, 3u);

  const auto mt = rank_boundaries(grid, PK::MeasuredTrust, 0, false);
  ASSERT_EQ(mt.size(), 2u);
  EXPECT_EQ(mt[1].rank, 3u);
  const auto punished = rank_boundaries(grid, PK::MeasuredTrust, 1, true);
  ASSERT_EQ(punished.size(), 1u);
  EXPECT_EQ(punished[0].age, 2.0);
  EXPECT_EQ(punished[0].rank, 4u);
  EXPECT_TRUE(rank_boundaries(grid, PK::BlindTrust, 0, false).empty());
  EXPECT_TRUE(rank_boundaries(grid, PK::MeasuredTrust, 2, true).empty());
  EXPECT_EQ(initial_rank(grid, PK::BlindTrust, 2), 3u);
}

TEST(RankBoundaries, AgreeWithRankFunction) {
  const auto grid = SizeGrid::create({0.4, 0.8, 1.6, 3.2});
  for (const auto kind : {TrustKind::MeasuredTrust, TrustKind::BlindTrust}) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (const bool punished : {false, true}) {
        const auto steps = rank_boundaries(grid, to_policy(kind), k, punished);
        for (double age = 0.0; age < 3.2; age += 0.05) {
          Rank expected = initial_rank(grid, to_policy(kind), k);
          for (const auto& s : steps) {
            if (age >= s.age) expected = s.rank;
          }
          EXPECT_EQ(rank_function(kind, grid, k, punished, age), expected);
        }
      }
    }
  }
}

TEST(Simulate, DeterministicForSeed) {
  const auto config = preset_example_3_1();
  const auto policy = PolicySpec::make(PolicyKind::MeasuredTrust, 0.43);
  const auto a = simulate(config, policy, small_sim(50'000, 3));
  const auto b = simulate(config, policy, small_sim(50'000, 3));
  EXPECT_EQ(a.overall.mean, b.overall.mean);
  EXPECT_EQ(a.overall.half_width95, b.overall.half_width95);
  EXPECT_EQ(a.per_cell.size(), b.per_cell.size());
  auto sim = small_sim(50'000, 3);
  sim.seed = 43;
  EXPECT_NE(simulate(config, policy, sim).overall.mean, a.overall.mean);
}

TEST(Simulate, LightTrafficResponseIsSize) {
  const auto base = preset_example_3_1();
  const SystemConfig config(0.001, base.grid(), base.matrix());
  const auto r = simulate(config, PolicySpec::make(PolicyKind::Fcfs, 0), small_sim(100'000, 3));
  EXPECT_NEAR(r.overall.mean, base.mean_size(), 0.02);
}

TEST(Simulate, LittlesLaw) {
  const auto config = find_preset("fig-1").family().at(0.1);
  const auto r = simulate(config, PolicySpec::make(PolicyKind::BlindTrust, 0.5), small_sim());
  EXPECT_NEAR(r.number_in_system.mean, config.lambda() * r.all_jobs_response.mean,
              0.01 * r.number_in_system.mean);
}

TEST(Simulate, MatchesClosedForms) {
  const auto config = find_preset("fig-1").family().at(0.1);
  for (const auto& policy :
       {PolicySpec::make(PolicyKind::Fcfs, 0), PolicySpec::make(PolicyKind::Scf, 0),
        PolicySpec::make(PolicyKind::MeasuredTrust, 0.6),
        PolicySpec::make(PolicyKind::BlindTrust, 0.8)}) {
    const auto r = simulate(config, policy, small_sim(1'500'000, 6));
    const double analytic = overall_mean_response(config, policy);
    // Wider than the CI so an unlucky seed does not flake.
    EXPECT_NEAR(r.overall.mean, analytic, std::max(2.0 * r.overall.half_width95, 0.015 * analytic))
        << to_string(policy.kind);
  }
}

TEST(Simulate, HonestClassesMatchDiagonal) {
  const auto config = find_preset("fig-1").family().at(0.2);
  const auto table = response_table(config, TrustKind::MeasuredTrust, 0.7);
  const auto r =
      simulate(config, PolicySpec::make(PolicyKind::MeasuredTrust, 0.7), small_sim(400'000, 6));
  ASSERT_EQ(r.per_honest_class.size(), 4u);
  for (const auto& [j, e] : r.per_honest_class) {
    EXPECT_NEAR(e.mean, table.t[j][j], std::max(2.0 * e.half_width95, 0.02 * table.t[j][j])) << j;
  }
}

TEST(Simulate, TraceCsv) {
  const auto config = preset_example_3_1();
  std::ostringstream trace;
  const auto sim = small_sim(1'000, 2);
  simulate(config, PolicySpec::make(PolicyKind::BlindTrust, 0.5), sim, &trace);
  std::istringstream in(trace.str());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "arrival_time,i,j,k,punish_coin,is_probe,response_time");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(rows, sim.job_count);
}

TEST(Simulate, WarnsNearSaturation) {
  const auto grid = SizeGrid::create({1.0});
  const SystemConfig config(0.985, grid, diagonal_matrix(std::vector{1.0}, grid));
  const auto r = simulate(config, PolicySpec::make(PolicyKind::Fcfs, 0), small_sim(10'000, 2));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].rfind("NotStabilized", 0), 0u);
}

TEST(SimConfig, Validation) {
  SimConfig sim;
  sim.probe_probability = 1.0;
  EXPECT_THROW(sim.validate(), ModelError);
  sim = SimConfig{};
  sim.job_count = 0;
  EXPECT_THROW(sim.validate(), std::invalid_argument);
}

TEST(CombineReplications, StudentT) {
  const auto e = combine_replications({1.0, 2.0, 3.0}, 30);
  EXPECT_DOUBLE_EQ(e.mean, 2.0);
  // t_{0.975, 2} = 4.302653, s = 1
  EXPECT_NEAR(e.half_width95, 4.302652729749464 / std::sqrt(3.0), 1e-9);
  EXPECT_TRUE(std::isinf(combine_replications({1.0}, 5).half_width95));
}

TEST(ReplicationSeed, Distinct) {
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_EQ(replication_seed(1, 1), replication_seed(2, 0));
}

}  // namespace
}  // namespace trustsched
