#include "trustsched/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "trustsched/incentive.hpp"
#include "trustsched/root_finding.hpp"
#include "trustsched/soap.hpp"

namespace trustsched {

SystemConfig SizeFamily::at(double error_rate) const {
  return SystemConfig(lambda, grid, uniform_error_matrix(size_dist, grid, error_rate));
}

std::vector<double> error_rate_grid(const SizeFamily& family, double x_step) {
  if (family.grid.size() == 1) return {0.0};
  return detail::unit_grid(x_step);
}

std::vector<SweepRow> sweep_region(const SizeFamily& family, double x_step, double b_step) {
  const auto xs = error_rate_grid(family, x_step);
  const auto bs = detail::unit_grid(b_step);
  std::vector<SweepRow> rows(xs.size() * bs.size());

  detail::parallel_for(xs.size(), [&](std::size_t xi) {
    const SystemConfig config = family.at(xs[xi]);
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      SweepRow& row = rows[xi * bs.size() + bi];
      row.x = xs[xi];
      row.b = bs[bi];
      const auto mt = response_table(config, TrustKind::MeasuredTrust, row.b);
      const auto bt = response_table(config, TrustKind::BlindTrust, row.b);
      row.ic_mt = ic_check(mt).compatible;
      row.ic_bt = ic_check(bt).compatible;
      row.et_mt = mt.overall;
      row.et_bt = bt.overall;
    }
  });
  return rows;
}

std::optional<BestPunishment> best_punishment(const SystemConfig& config, TrustKind kind,
                                              double b_step) {
  const auto region = ic_region(config, kind, RegionOptions{b_step, 1e-9, kDefaultIcTolerance});
  if (region.empty()) return std::nullopt;
  auto cost = [&](double b) { return trust_overall_mean_response(config, kind, b); };

  std::optional<BestPunishment> best;
  auto offer = [&](double b) {
    const double v = cost(b);
    // Values equal up to rounding count as ties.
    const double slack = best ? 1e-12 * std::abs(best->mean_response) : 0.0;
    if (!best || v < best->mean_response - slack ||
        (v <= best->mean_response + slack && b < best->b)) {
      best = BestPunishment{b, v};
    }
  };
  for (const auto& iv : region.intervals) {
    offer(iv.lo);
    for (double b = std::ceil(iv.lo / b_step) * b_step; b < iv.hi; b += b_step) {
      if (b > iv.lo) offer(b);
    }
    offer(iv.hi);
  }

  // Refine inside the neighbouring grid cells by bisecting the sign of the
  // central-difference slope.
  const BInterval* home = nullptr;
  for (const auto& iv : region.intervals) {
    if (iv.lo <= best->b && best->b <= iv.hi) home = &iv;
  }
  const double lo = std::max(home->lo, best->b - b_step);
  const double hi = std::min(home->hi, best->b + b_step);
  constexpr double h = 1e-7;
  auto slope = [&](double b) { return (cost(b + h) - cost(b - h)) / (2.0 * h); };
  if (hi - lo > 4.0 * h) {
    const double s_lo = slope(lo + 2.0 * h);
    const double s_hi = slope(hi - 2.0 * h);
    if (s_lo < 0.0 && s_hi > 0.0) {
      const double b = bisect(slope, lo + 2.0 * h, hi - 2.0 * h, 1e-9);
      const double v = cost(b);
      if (v < best->mean_response) best = BestPunishment{b, v};
    }
  }
  return best;
}

std::vector<CurveRow> optimal_b_curve(const SizeFamily& family, double x_step, double b_step) {
  const auto xs = error_rate_grid(family, x_step);
  std::vector<CurveRow> rows(xs.size());
  const SystemConfig base = family.at(0.0);
  const double fcfs = fcfs_mean_response(base);
  const double scf = scf_mean_response(base).overall;

  detail::parallel_for(xs.size(), [&](std::size_t xi) {
    const SystemConfig config = family.at(xs[xi]);
    CurveRow& row = rows[xi];
    row.x = xs[xi];
    row.et_fcfs = fcfs;
    row.et_scf = scf;
    if (const auto mt = best_punishment(config, TrustKind::MeasuredTrust, b_step)) {
      row.best_b_mt = mt->b;
      row.et_mt = mt->mean_response;
    }
    if (const auto bt = best_punishment(config, TrustKind::BlindTrust, b_step)) {
      row.best_b_bt = bt->b;
      row.et_bt = bt->mean_response;
    }
  });
  return rows;
}

std::optional<FrontierPoint> feasibility_frontier(const std::vector<SweepRow>& rows,
                                                  TrustKind kind) {
  std::optional<FrontierPoint> out;
  for (const auto& row : rows) {
    const bool ic = kind == TrustKind::MeasuredTrust ? row.ic_mt : row.ic_bt;
    if (!ic) continue;
    if (!out || row.x > out->x) {
      out = FrontierPoint{row.x, row.b, row.b};
    } else if (row.x == out->x) {
      out->b_lo = std::min(out->b_lo, row.b);
      out->b_hi = std::max(out->b_hi, row.b);
    }
  }
  return out;
}

std::vector<std::size_t> ic_run_counts(const std::vector<SweepRow>& rows, TrustKind kind) {
  std::vector<std::size_t> counts;
  std::optional<double> current_x;
  bool previous = false;
  for (const auto& row : rows) {
    if (!current_x || row.x != *current_x) {
      counts.push_back(0);
      current_x = row.x;
      previous = false;
    }
    const bool ic = kind == TrustKind::MeasuredTrust ? row.ic_mt : row.ic_bt;
    if (ic && !previous) ++counts.back();
    previous = ic;
  }
  return counts;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void parse_fail(const std::string& msg) {
  throw ModelError(ErrorCode::ParseError, "ParseError: " + msg);
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) parse_fail("trailing characters in '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail("not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    parse_fail("number out of range: '" + s + "'");
  }
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number(s);
}

bool parse_flag(const std::string& s) {
  if (s == "0") return false;
  if (s == "1") return true;
  parse_fail("expected 0 or 1, got '" + s + "'");
}

// Returns data lines after the expected header, skipping '#' comments.
std::vector<std::vector<std::string>> read_table(std::istream& is, const std::string& header) {
  std::string line;
  bool seen_header = false;
  std::vector<std::vector<std::string>> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) parse_fail("unexpected header '" + line + "'");
      seen_header = true;
      continue;
    }
    out.push_back(split_csv_line(line));
  }
  if (!seen_header) parse_fail("missing header");
  return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.x) << ',' << format_number(r.b) << ',' << (r.ic_mt ? 1 : 0) << ','
       << (r.ic_bt ? 1 : 0) << ',' << optional_number(r.et_mt) << ',' << optional_number(r.et_bt)
       << '\n';
  }
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "# best_b is the smallest minimizer of E[T] over the IC region\n";
  os << kCurveHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.x) << ',' << optional_number(r.best_b_mt) << ','
       << optional_number(r.et_mt) << ',' << optional_number(r.best_b_bt) << ','
       << optional_number(r.et_bt) << ',' << format_number(r.et_fcfs) << ','
       << format_number(r.et_scf) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  for (const auto& f : read_table(is, kSweepHeader)) {
    if (f.size() != 6) parse_fail("sweep row needs 6 fields");
    rows.push_back({parse_number(f[0]), parse_number(f[1]), parse_flag(f[2]), parse_flag(f[3]),
                    parse_optional(f[4]), parse_optional(f[5])});
  }
  return rows;
}

std::vector<CurveRow> read_curve_csv(std::istream& is) {
  std::vector<CurveRow> rows;
  for (const auto& f : read_table(is, kCurveHeader)) {
    if (f.size() != 7) parse_fail("curve row needs 7 fields");
    rows.push_back({parse_number(f[0]), parse_optional(f[1]), parse_optional(f[2]),
                    parse_optional(f[3]), parse_optional(f[4]), parse_number(f[5]),
                    parse_number(f[6])});
  }
  return rows;
}

SystemConfig Preset::config() const {
  return validate_config(RawConfig{lambda, sizes, matrix});
}

SizeFamily Preset::family() const {
  return SizeFamily{SizeGrid::create(sizes), size_probs, lambda};
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    v.push_back(Preset{
        "example-3-1",
        "Three classes Z = {1, 2, 3}, noisy estimates, lambda = 0.5",
        0.5,
        {1.0, 2.0, 3.0},
        {0.465, 0.325, 0.21},
        {{0.425, 0.03, 0.01}, {0.05, 0.255, 0.02}, {0.025, 0.015, 0.17}},
    });
    {
      Preset fig{"fig-1",
                 "Sizes 0.4/0.8/1.6/3.2 w.p. 1/2, 1/4, 1/8, 1/8, lambda = 0.8, exact estimates",
                 0.8,
                 {0.4, 0.8, 1.6, 3.2},
                 {0.5, 0.25, 0.125, 0.125},
                 {}};
      fig.matrix = {{0.5, 0, 0, 0}, {0, 0.25, 0, 0}, {0, 0, 0.125, 0}, {0, 0, 0, 0.125}};
      v.push_back(std::move(fig));
    }
    v.push_back(Preset{
        "footnote-5",
        "Sizes {1, 1.1} w.p. 0.99 / 0.01, exact estimates, lambda = 0.8",
        0.8,
        {1.0, 1.1},
        {0.99, 0.01},
        {{0.99, 0.0}, {0.0, 0.01}},
    });
    return v;
  }();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("unknown preset '" + name + "'");
}

SystemConfig preset_example_3_1() { return find_preset("example-3-1").config(); }

}  // namespace trustsched
