#pragma once

// Discrete-event simulation of the preemptive single-server queue under any
// of the four policies. Used as an independent check on the closed forms.
//
// Honest jobs declare their internal estimate. A sparse fraction of "probe"
// jobs declare a class drawn uniformly at random; grouping probes by
// (true class, declared class) estimates E[U_ik] while leaving the honest
// equilibrium almost untouched.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trustsched/model.hpp"
#include "trustsched/soap.hpp"

namespace trustsched {

struct SimConfig {
  std::uint64_t job_count = 1'000'000;
  double warmup_fraction = 0.1;
  double probe_probability = 0.005;
  std::uint64_t seed = 1;
  std::size_t replications = 10;

  /// Throws BadProbability / std::invalid_argument on bad fields.
  void validate() const;
};

struct JobRecord {
  double arrival_time = 0.0;
  std::size_t true_class = 0;
  std::size_t estimate = 0;
  std::size_t declared = 0;
  bool punish_coin = false;
  bool is_probe = false;
  double completion_time = 0.0;

  double response_time() const { return completion_time - arrival_time; }
};

struct SimEstimate {
  double mean = 0.0;
  /// Half-width of the 95% t-interval across replications; infinite when
  /// fewer than two replications observed the cell.
  double half_width95 = 0.0;
  std::uint64_t count = 0;

  double lower() const { return mean - half_width95; }
  double upper() const { return mean + half_width95; }
  bool covers(double value) const { return lower() <= value && value <= upper(); }
};

struct RankStep {
  double age = 0.0;
  Rank rank = 0;
};

/// Rank at age zero for a job declaring `declared`.
Rank initial_rank(const SizeGrid& grid, PolicyKind kind, std::size_t declared);

/// Ages below the largest size at which the rank changes, with the new rank.
std::vector<RankStep> rank_boundaries(const SizeGrid& grid, PolicyKind kind,
                                      std::size_t declared, bool punished);

struct SimResult {
  /// Honest (non-probe) jobs after warmup.
  SimEstimate overall;
  /// Probe jobs keyed by (true class, declared class).
  std::map<std::pair<std::size_t, std::size_t>, SimEstimate> per_cell;
  /// Honest jobs keyed by internal estimate: estimates E[T_jj].
  std::map<std::size_t, SimEstimate> per_honest_class;
  /// Time-average number in system over each whole replication.
  SimEstimate number_in_system;
  /// Mean response of every job (probes and warmup included).
  SimEstimate all_jobs_response;
  std::vector<std::string> warnings;
};

/// Seed for replication r: splitmix64(base + r).
std::uint64_t replication_seed(std::uint64_t base, std::size_t replication);

/// Runs sim.replications independent replications. When `trace` is given,
/// replication 0 writes one CSV row per completed job to it.
SimResult simulate(const SystemConfig& config, const PolicySpec& policy, const SimConfig& sim,
                   std::ostream* trace = nullptr);

/// Combine per-replication means into a mean and 95% half-width.
SimEstimate combine_replications(const std::vector<double>& means, std::uint64_t count);

}  // namespace trustsched
