#pragma once

// Test-only helpers: random valid configurations and a brute-force relevant
// size oracle that follows each job's class history step by step instead of
// reading off a case table.

#include <algorithm>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "trustsched/model.hpp"

namespace trustsched::testing {

inline SystemConfig random_config(std::mt19937_64& rng, std::size_t n_min = 2,
                                  std::size_t n_max = 5, double max_load = 0.95) {
  std::uniform_int_distribution<std::size_t> pick_n(n_min, n_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = pick_n(rng);

  std::vector<double> sizes(n);
  double z = 0.0;
  for (auto& s : sizes) {
    z += 0.1 + 2.0 * unit(rng);
    s = z;
  }
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  double total = 0.0;
  for (auto& row : m) {
    for (auto& v : row) {
      // Some exact zeros, and a heavier diagonal most of the time.
      v = unit(rng) < 0.15 ? 0.0 : unit(rng);
      total += v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] += 2.0 * unit(rng) * total / static_cast<double>(n);
  }
  total = 0.0;
  for (const auto& row : m) {
    for (double v : row) total += v;
  }
  for (auto& row : m) {
    for (auto& v : row) v /= total;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) mean += m[i][j] * sizes[i];
  }
  const double lambda = (0.05 + (max_load - 0.06) * unit(rng)) / mean;
  return validate_config(RawConfig{lambda, sizes, m});
}

/// Service a job receives while its class is <= `rank` (1-based), found by
/// walking the class it occupies over each age segment.
///   - Starts in class j + 1 until age z_j.
///   - Punished: jumps to n + 1.
///   - MeasuredTrust unpunished: class l + 1 on [z_{l-1}, z_l).
///   - BlindTrust unpunished: stays in class j + 1.
inline double oracle_relevant_size(bool measured, std::span<const double> z, std::size_t true_class,
                                   std::size_t estimate, std::size_t rank, bool punished) {
  const std::size_t n = z.size();
  const double size = z[true_class];
  std::vector<double> cuts{0.0};
  for (double c : z) {
    if (c < size) cuts.push_back(c);
  }
  cuts.push_back(size);

  double service = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double from = cuts[s];
    const double to = cuts[s + 1];
    if (to <= from) continue;
    std::size_t cls;
    if (from < z[estimate]) {
      cls = estimate + 1;
    } else if (punished) {
      cls = n + 1;
    } else if (!measured) {
      cls = estimate + 1;
    } else {
      std::size_t l = 0;
      while (l < n && !(from < z[l])) ++l;
      cls = l + 1;
    }
    if (cls <= rank) service += to - from;
  }
  return service;
}

}  // namespace trustsched::testing
