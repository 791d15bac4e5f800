#include "trustsched/incentive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trustsched/root_finding.hpp"

namespace trustsched {

namespace {

void check_pair(const SystemConfig& config, std::size_t estimate, std::size_t declared) {
  const std::size_t n = config.n();
  if (estimate >= n || declared >= n) {
    throw ModelError(ErrorCode::BadIndex, "size class index out of range");
  }
  if (config.matrix().estimate_marginal(estimate) <= 0.0) {
    throw ModelError(ErrorCode::UndefinedColumn,
                     "estimate class " + std::to_string(estimate + 1) + " has zero probability");
  }
}

// E[T_jk] from the U matrix, without the 1/R_j factor applied twice.
double t_entry(const SystemConfig& config, const MomentTable& moments, TrustKind kind, double b,
               std::size_t estimate, std::size_t declared) {
  const auto& m = config.matrix();
  double acc = 0.0;
  for (std::size_t i = 0; i < config.n(); ++i) {
    const double p = m(i, estimate);
    if (p == 0.0) continue;
    acc += p * mean_response_u(moments, config, kind, b, i, declared).mean;
  }
  return acc / m.estimate_marginal(estimate);
}

}  // namespace

ICReport ic_check(const ResponseTable& table, double tol) {
  const std::size_t n = table.n;
  ICReport report;
  report.delta.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (!table.defined(j)) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = table.t[j][k] - table.t[j][j];
      report.delta[j][k] = d;
      if (d < -tol) report.violations.push_back({j, k, d});
    }
  }
  report.compatible = report.violations.empty();
  return report;
}

ICReport ic_check(const SystemConfig& config, TrustKind kind, double punishment, double tol) {
  return ic_check(response_table(config, kind, punishment), tol);
}

double ic_margin(const SystemConfig& config, TrustKind kind, double punishment) {
  const auto table = response_table(config, kind, punishment);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < table.n; ++j) {
    if (!table.defined(j)) continue;
    for (std::size_t k = 0; k < table.n; ++k) {
      if (k != j) margin = std::min(margin, table.t[j][k] - table.t[j][j]);
    }
  }
  return margin;
}

double pair_delta(const SystemConfig& config, TrustKind kind, std::size_t estimate,
                  std::size_t declared, double punishment) {
  check_pair(config, estimate, declared);
  const auto moments = relevant_size_moments(config, kind, punishment);
  return t_entry(config, moments, kind, punishment, estimate, declared) -
         t_entry(config, moments, kind, punishment, estimate, estimate);
}

std::vector<double> pair_threshold(const SystemConfig& config, TrustKind kind,
                                   std::size_t estimate, std::size_t declared,
                                   const PairOptions& options) {
  check_pair(config, estimate, declared);
  if (declared == estimate) {
    throw ModelError(ErrorCode::BadIndex, "declared class must differ from the estimate");
  }
  auto delta = [&](double b) { return pair_delta(config, kind, estimate, declared, b); };

  std::vector<double> roots;
  if (kind == TrustKind::MeasuredTrust) {
    const double d0 = delta(0.0);
    const double d1 = delta(1.0);
    if (d0 == 0.0) roots.push_back(0.0);
    if (d1 == 0.0) roots.push_back(1.0);
    if (d0 != 0.0 && d1 != 0.0 && std::signbit(d0) != std::signbit(d1)) {
      roots.push_back(bisect(delta, 0.0, 1.0, options.tol_b));
    }
    return roots;
  }

  const auto grid = detail::unit_grid(options.grid_step);
  double prev = delta(grid[0]);
  if (prev == 0.0) roots.push_back(grid[0]);
  for (std::size_t m = 1; m < grid.size(); ++m) {
    const double cur = delta(grid[m]);
    if (cur == 0.0) {
      roots.push_back(grid[m]);
    } else if (prev != 0.0 && std::signbit(prev) != std::signbit(cur)) {
      roots.push_back(bisect(delta, grid[m - 1], grid[m], options.tol_b));
    }
    prev = cur;
  }
  return roots;
}

bool BIntervalSet::contains(double b) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [b](const BInterval& iv) { return iv.lo <= b && b <= iv.hi; });
}

double BIntervalSet::measure() const {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.hi - iv.lo;
  return total;
}

namespace {

// Each MeasuredTrust pair delta crosses zero at most once on [0, 1], so every
// per-pair feasible set is [0, r], [r, 1], all of [0, 1] or empty, and the
// intersection is a single interval.
BIntervalSet measured_trust_region(const SystemConfig& config, const RegionOptions& options) {
  constexpr auto kind = TrustKind::MeasuredTrust;
  BIntervalSet out;
  out.grid_step = options.grid_step;
  out.tol_b = options.tol_b;

  double lo = 0.0;
  double hi = 1.0;
  const auto estimates = config.matrix().estimate_marginals();
  for (std::size_t j = 0; j < config.n(); ++j) {
    if (estimates[j] <= 0.0) continue;
    for (std::size_t k = 0; k < config.n(); ++k) {
      if (k == j) continue;
      auto shifted = [&](double b) {
        return pair_delta(config, kind, j, k, b) + options.tol;
      };
      const double at_zero = shifted(0.0);
      const double at_one = shifted(1.0);
      const bool ok_zero = at_zero >= 0.0;
      const bool ok_one = at_one >= 0.0;
      if (ok_zero && ok_one) continue;
      if (!ok_zero && !ok_one) return out;
      const double root = bisect(shifted, 0.0, 1.0, options.tol_b);
      if (ok_one) {
        lo = std::max(lo, root);
      } else {
        hi = std::min(hi, root);
      }
    }
  }
  if (lo > hi) return out;

  const double mid = 0.5 * (lo + hi);
  if (ic_margin(config, kind, mid) < -options.tol - 1e-6) {
    throw std::logic_error("MeasuredTrust feasible set is not a single interval");
  }
  out.intervals.push_back({lo, hi});
  return out;
}

}  // namespace

BIntervalSet ic_region(const SystemConfig& config, TrustKind kind, const RegionOptions& options) {
  if (kind == TrustKind::MeasuredTrust) return measured_trust_region(config, options);
  return scan_region([&](double b) { return ic_margin(config, kind, b) + options.tol; }, options);
}

double baseline_mean_response(const SystemConfig& config, Baseline baseline) {
  return baseline == Baseline::Fcfs ? fcfs_mean_response(config)
                                    : scf_mean_response(config).overall;
}

BIntervalSet social_benefit_region(const SystemConfig& config, TrustKind kind, Baseline baseline,
                                   const RegionOptions& options) {
  const double reference = baseline_mean_response(config, baseline);
  return scan_region(
      [&](double b) {
        return reference - trust_overall_mean_response(config, kind, b) + options.tol;
      },
      options);
}

}  // namespace trustsched
