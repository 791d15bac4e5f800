#pragma once

// Incentive compatibility and social benefit as functions of the punishment
// probability b.
//
// A policy is incentive compatible at b when no internal estimate j gains by
// declaring k != j: E[T_jk] - E[T_jj] >= -tol for every j with R_j > 0.

#include <cstddef>
#include <optional>
#include <vector>

#include "trustsched/model.hpp"
#include "trustsched/soap.hpp"

namespace trustsched {

inline constexpr double kDefaultIcTolerance = 1e-9;

struct Violation {
  std::size_t estimate = 0;
  std::size_t declared = 0;
  double delta = 0.0;
};

struct ICReport {
  /// delta[j][k] = E[T_jk] - E[T_jj]; empty on the diagonal and for
  /// estimate classes with zero probability.
  std::vector<std::vector<std::optional<double>>> delta;
  bool compatible = true;
  std::vector<Violation> violations;
};

ICReport ic_check(const SystemConfig& config, TrustKind kind, double punishment,
                  double tol = kDefaultIcTolerance);

/// Build the report from an already computed table.
ICReport ic_check(const ResponseTable& table, double tol = kDefaultIcTolerance);

/// min over valid (j, k) of delta[j][k]; +inf when no pair exists.
double ic_margin(const SystemConfig& config, TrustKind kind, double punishment);

/// b -> E[T_jk](b) - E[T_jj](b). Throws UndefinedColumn when R_j = 0.
double pair_delta(const SystemConfig& config, TrustKind kind, std::size_t estimate,
                  std::size_t declared, double punishment);

struct PairOptions {
  double tol_b = 1e-6;
  /// Scan resolution for BlindTrust. Sign changes closer together than this
  /// can be missed.
  double grid_step = 1e-3;
};

/// Roots of b -> delta[j][k] in [0, 1], ascending. MeasuredTrust relies on
/// single crossing and only inspects the endpoints.
std::vector<double> pair_threshold(const SystemConfig& config, TrustKind kind,
                                   std::size_t estimate, std::size_t declared,
                                   const PairOptions& options = {});

struct BInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BIntervalSet {
  std::vector<BInterval> intervals;
  double grid_step = 0.0;
  double tol_b = 0.0;

  bool empty() const noexcept { return intervals.empty(); }
  bool contains(double b) const;
  /// Total length, for comparing widths.
  double measure() const;
};

struct RegionOptions {
  double grid_step = 1e-3;
  double tol_b = 1e-6;
  double tol = kDefaultIcTolerance;
};

/// Punishment probabilities for which the policy is incentive compatible.
/// MeasuredTrust yields at most one interval.
BIntervalSet ic_region(const SystemConfig& config, TrustKind kind,
                       const RegionOptions& options = {});

enum class Baseline { Fcfs, Scf };

double baseline_mean_response(const SystemConfig& config, Baseline baseline);

/// {b : E[T](b) <= E[T_baseline]}.
BIntervalSet social_benefit_region(const SystemConfig& config, TrustKind kind, Baseline baseline,
                                   const RegionOptions& options = {});

/// Generic scan: grid evaluation of margin(b) on [0, 1] followed by
/// bisection of every feasibility boundary. Feasible means margin >= 0.
template <typename Margin>
BIntervalSet scan_region(Margin&& margin, const RegionOptions& options);

}  // namespace trustsched

#include "trustsched/detail/scan_region.hpp"
