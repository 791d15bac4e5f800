#include "trustsched/soap.hpp"

#include <algorithm>
#include <stdexcept>

namespace trustsched {

namespace {

void check_class(std::size_t c, std::size_t n) {
  if (c >= n) throw ModelError(ErrorCode::BadIndex, "size class index out of range");
}

MomentTable empty_table(std::size_t n, double lambda) {
  MomentTable t;
  t.lambda = lambda;
  t.m1.assign(n + 2, 0.0);
  t.m2.assign(n + 2, 0.0);
  t.rho.assign(n + 2, 0.0);
  return t;
}

void finish_table(MomentTable& t, const SystemConfig& config) {
  const std::size_t n = config.n();
  t.m1[n + 1] = config.mean_size();
  t.m2[n + 1] = config.second_moment();
  for (std::size_t l = 0; l < n + 2; ++l) t.rho[l] = config.lambda() * t.m1[l];
}

}  // namespace

Rank rank_function(TrustKind kind, const SizeGrid& grid, std::size_t declared, bool punished,
                   double age) {
  const std::size_t n = grid.size();
  check_class(declared, n);
  if (age < grid[declared]) return declared + 1;
  if (punished) return n + 1;
  if (kind == TrustKind::BlindTrust) return declared + 1;
  const auto values = grid.values();
  const auto it = std::upper_bound(values.begin(), values.end(), age);
  return static_cast<Rank>(it - values.begin()) + 1;
}

Rank final_rank(TrustKind kind, std::size_t n, std::size_t true_class, std::size_t declared,
                bool punished) {
  if (true_class <= declared) return declared + 1;
  if (punished) return n + 1;
  return kind == TrustKind::MeasuredTrust ? true_class + 1 : declared + 1;
}

double relevant_size(TrustKind kind, const SizeGrid& grid, std::size_t true_class,
                     std::size_t estimate, Rank rank, bool punished) {
  // Class c is at or below rank l exactly when c + 1 <= l.
  if (estimate + 1 > rank) return 0.0;
  if (true_class <= estimate) return grid[true_class];
  if (punished) return grid[estimate];
  if (kind == TrustKind::BlindTrust || true_class + 1 <= rank) return grid[true_class];
  return grid[rank - 1];
}

MomentTable relevant_size_moments(const SystemConfig& config, TrustKind kind, double punishment) {
  check_probability(punishment, "punishment probability");
  const std::size_t n = config.n();
  const auto& grid = config.grid();
  const auto& m = config.matrix();
  MomentTable t = empty_table(n, config.lambda());
  for (Rank l = 1; l <= n; ++l) {
    double first = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double p = m(i, j);
        if (p == 0.0) continue;
        const double hit = relevant_size(kind, grid, i, j, l, true);
        const double miss = relevant_size(kind, grid, i, j, l, false);
        if (hit == miss) {
          first += p * hit;
          second += p * hit * hit;
          continue;
        }
        first += p * (punishment * hit + (1.0 - punishment) * miss);
        second += p * (punishment * hit * hit + (1.0 - punishment) * miss * miss);
      }
    }
    t.m1[l] = first;
    t.m2[l] = second;
  }
  finish_table(t, config);
  return t;
}

double soap_response(const MomentTable& moments, Rank rank, double size) {
  const double below = moments.load_below(rank);
  const double at_most = moments.load_at_most(rank);
  return moments.lambda * moments.m2[rank] / (2.0 * (1.0 - below) * (1.0 - at_most)) +
         size / (1.0 - below);
}

DeviationResponse mean_response_u(const MomentTable& moments, const SystemConfig& config,
                                  TrustKind kind, double punishment, std::size_t true_class,
                                  std::size_t declared) {
  const std::size_t n = config.n();
  check_class(true_class, n);
  check_class(declared, n);
  const double z = config.grid()[true_class];
  DeviationResponse out;
  if (true_class <= declared) {
    out.mean = soap_response(moments, declared + 1, z);
    return out;
  }
  out.punished = soap_response(moments, final_rank(kind, n, true_class, declared, true), z);
  out.unpunished = soap_response(moments, final_rank(kind, n, true_class, declared, false), z);
  out.mean = punishment * *out.punished + (1.0 - punishment) * *out.unpunished;
  return out;
}

DeviationResponse mean_response_u(const SystemConfig& config, TrustKind kind, double punishment,
                                  std::size_t true_class, std::size_t declared) {
  const auto moments = relevant_size_moments(config, kind, punishment);
  return mean_response_u(moments, config, kind, punishment, true_class, declared);
}

ResponseTable response_table(const SystemConfig& config, TrustKind kind, double punishment) {
  const std::size_t n = config.n();
  const auto& m = config.matrix();
  const auto moments = relevant_size_moments(config, kind, punishment);

  ResponseTable table;
  table.n = n;
  table.u.assign(n, std::vector<double>(n, 0.0));
  table.u_punished.assign(n, std::vector<std::optional<double>>(n));
  table.u_unpunished.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto r = mean_response_u(moments, config, kind, punishment, i, k);
      table.u[i][k] = r.mean;
      table.u_punished[i][k] = r.punished;
      table.u_unpunished[i][k] = r.unpunished;
    }
  }

  table.t.assign(n, std::vector<double>(n, 0.0));
  table.estimate_defined.assign(n, false);
  table.overall = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = m.estimate_marginal(j);
    if (r <= 0.0) continue;
    table.estimate_defined[j] = true;
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += m(i, j) * table.u[i][k];
      table.t[j][k] = acc / r;
    }
    table.overall += r * table.t[j][j];
  }
  return table;
}

double trust_overall_mean_response(const SystemConfig& config, TrustKind kind, double punishment) {
  const std::size_t n = config.n();
  const auto& m = config.matrix();
  const auto moments = relevant_size_moments(config, kind, punishment);
  double overall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m(i, j) == 0.0) continue;
      overall += m(i, j) * mean_response_u(moments, config, kind, punishment, i, j).mean;
    }
  }
  return overall;
}

double fcfs_mean_response(const SystemConfig& config) {
  return config.mean_size() +
         config.lambda() * config.second_moment() / (2.0 * (1.0 - config.load()));
}

ScfResponse scf_mean_response(const SystemConfig& config) {
  const std::size_t n = config.n();
  const auto& grid = config.grid();
  const auto sizes = config.matrix().size_marginals();

  // Under SCF a job of age a has rank min{l : a < z_l}, so the service an
  // honest job receives at ranks <= l is min(S, z_l).
  MomentTable t = empty_table(n, config.lambda());
  for (Rank l = 1; l <= n; ++l) {
    const double cap = grid[l - 1];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::min(grid[i], cap);
      t.m1[l] += sizes[i] * v;
      t.m2[l] += sizes[i] * v * v;
    }
  }
  finish_table(t, config);

  ScfResponse out;
  out.per_size.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.per_size[i] = soap_response(t, i + 1, grid[i]);
    out.overall += sizes[i] * out.per_size[i];
  }
  return out;
}

double overall_mean_response(const SystemConfig& config, const PolicySpec& policy) {
  switch (policy.kind) {
    case PolicyKind::Fcfs: return fcfs_mean_response(config);
    case PolicyKind::Scf: return scf_mean_response(config).overall;
    case PolicyKind::MeasuredTrust:
    case PolicyKind::BlindTrust:
      return trust_overall_mean_response(config, policy.trust_kind(), policy.punishment);
  }
  throw std::logic_error("unhandled policy kind");
}

}  // namespace trustsched
