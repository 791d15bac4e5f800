#pragma once

// Closed-form mean response times for rank-based M/G/1 policies.
//
// Ranks are 1-based: a job declaring size class k (0-based) starts at rank
// k + 1, and rank n + 1 is the punishment class. Every trust-policy rank
// function is weakly increasing in age, so a job's worst future rank is
// its final rank w and its mean response time is
//
//   lambda E[S_{<=w}^2] / (2 (1 - rho_{<w}) (1 - rho_{<=w})) + z / (1 - rho_{<w})
//
// where S_{<=l} is the service a generic honest job receives while its rank
// is at most l, and rho_{<=l} = lambda E[S_{<=l}].

#include <cstddef>
#include <optional>
#include <vector>

#include "trustsched/model.hpp"

namespace trustsched {

using Rank = std::size_t;

/// Rank of a job with the given declared class after `age` units of service.
Rank rank_function(TrustKind kind, const SizeGrid& grid, std::size_t declared, bool punished,
                   double age);

/// Final rank of a job of true class i declaring k.
Rank final_rank(TrustKind kind, std::size_t n, std::size_t true_class, std::size_t declared,
                bool punished);

/// Service received at ranks <= `rank` by an honest job with true class i and
/// internal estimate j, for ranks 1..n.
double relevant_size(TrustKind kind, const SizeGrid& grid, std::size_t true_class,
                     std::size_t estimate, Rank rank, bool punished);

/// Per-rank relevant-size moments, indexed 0..n+1. Index 0 is the empty
/// relevant size and index n+1 the full service distribution.
struct MomentTable {
  double lambda = 0.0;
  std::vector<double> m1;
  std::vector<double> m2;
  std::vector<double> rho;

  std::size_t n() const noexcept { return m1.size() - 2; }
  double load_at_most(Rank rank) const { return rho[rank]; }
  double load_below(Rank rank) const { return rho[rank - 1]; }
};

MomentTable relevant_size_moments(const SystemConfig& config, TrustKind kind, double punishment);

/// Mean response for a job whose worst rank is `rank`, given its size.
double soap_response(const MomentTable& moments, Rank rank, double size);

struct DeviationResponse {
  double mean = 0.0;
  /// Present only when the job overruns its declaration (true class > k).
  std::optional<double> punished;
  std::optional<double> unpunished;
};

DeviationResponse mean_response_u(const MomentTable& moments, const SystemConfig& config,
                                  TrustKind kind, double punishment, std::size_t true_class,
                                  std::size_t declared);

DeviationResponse mean_response_u(const SystemConfig& config, TrustKind kind, double punishment,
                                  std::size_t true_class, std::size_t declared);

/// U is indexed [true class][declared class], T by [internal estimate][declared].
/// T rows for estimate classes with zero probability are undefined.
struct ResponseTable {
  std::size_t n = 0;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<std::optional<double>>> u_punished;
  std::vector<std::vector<std::optional<double>>> u_unpunished;
  std::vector<std::vector<double>> t;
  std::vector<bool> estimate_defined;
  double overall = 0.0;

  bool defined(std::size_t estimate) const { return estimate_defined[estimate]; }
};

ResponseTable response_table(const SystemConfig& config, TrustKind kind, double punishment);

/// Overall honest-equilibrium E[T] without materializing the full table.
double trust_overall_mean_response(const SystemConfig& config, TrustKind kind, double punishment);

double fcfs_mean_response(const SystemConfig& config);

struct ScfResponse {
  double overall = 0.0;
  std::vector<double> per_size;
};

/// Smallest Class First: serves the job whose minimum possible size given its
/// age is smallest, FCFS among equals.
ScfResponse scf_mean_response(const SystemConfig& config);

/// Overall E[T] of any of the four policies under honest declarations.
double overall_mean_response(const SystemConfig& config, const PolicySpec& policy);

}  // namespace trustsched
