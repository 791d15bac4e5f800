#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "trustsched/root_finding.hpp"

namespace trustsched {

namespace detail {

inline std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  std::vector<double> grid(cells + 1);
  for (std::size_t m = 0; m <= cells; ++m) grid[m] = std::min(1.0, static_cast<double>(m) * step);
  return grid;
}

}  // namespace detail

template <typename Margin>
BIntervalSet scan_region(Margin&& margin, const RegionOptions& options) {
  const auto grid = detail::unit_grid(options.grid_step);
  std::vector<double> values(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) values[m] = margin(grid[m]);

  BIntervalSet out;
  out.grid_step = options.grid_step;
  out.tol_b = options.tol_b;
  std::size_t m = 0;
  while (m < grid.size()) {
    if (values[m] < 0.0) {
      ++m;
      continue;
    }
    const std::size_t first = m;
    while (m + 1 < grid.size() && values[m + 1] >= 0.0) ++m;
    const std::size_t last = m;
    BInterval interval{grid[first], grid[last]};
    if (first > 0) interval.lo = bisect(margin, grid[first - 1], grid[first], options.tol_b);
    if (last + 1 < grid.size()) interval.hi = bisect(margin, grid[last], grid[last + 1], options.tol_b);
    out.intervals.push_back(interval);
    ++m;
  }
  return out;
}

}  // namespace trustsched
