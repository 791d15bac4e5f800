#pragma once

// Parameter sweeps over the uniform-error family: incentive-compatible
// regions in the (error rate, punishment) plane and best-b response curves
// against the blind baselines. Plus the built-in presets.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trustsched/model.hpp"

namespace trustsched {

/// A size distribution and arrival rate; the estimate matrix is filled in
/// per error rate by uniform_error_matrix.
struct SizeFamily {
  SizeGrid grid;
  std::vector<double> size_dist;
  double lambda = 0.0;

  SystemConfig at(double error_rate) const;
};

struct SweepRow {
  double x = 0.0;
  double b = 0.0;
  bool ic_mt = false;
  bool ic_bt = false;
  std::optional<double> et_mt;
  std::optional<double> et_bt;
};

struct CurveRow {
  double x = 0.0;
  std::optional<double> best_b_mt;
  std::optional<double> et_mt;
  std::optional<double> best_b_bt;
  std::optional<double> et_bt;
  double et_fcfs = 0.0;
  double et_scf = 0.0;
};

/// Error rates 0, step, 2 step, ... up to 1 (only 0 for a single class).
std::vector<double> error_rate_grid(const SizeFamily& family, double x_step);

/// Rows ordered by x, then b.
std::vector<SweepRow> sweep_region(const SizeFamily& family, double x_step = 0.005,
                                   double b_step = 0.001);

std::vector<CurveRow> optimal_b_curve(const SizeFamily& family, double x_step = 0.005,
                                      double b_step = 0.001);

/// Minimizer of overall E[T] over the IC region at one error rate; ties go
/// to the smallest b. Empty when the region is empty.
struct BestPunishment {
  double b = 0.0;
  double mean_response = 0.0;
};
std::optional<BestPunishment> best_punishment(const SystemConfig& config, TrustKind kind,
                                              double b_step = 0.001);

/// Largest error rate in a sweep that admits any IC b, with the IC b-range
/// found at that rate.
struct FrontierPoint {
  double x = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;
  double b_mid() const { return 0.5 * (b_lo + b_hi); }
};
std::optional<FrontierPoint> feasibility_frontier(const std::vector<SweepRow>& rows,
                                                  TrustKind kind);

/// Number of maximal runs of IC b values per error rate, in x order.
std::vector<std::size_t> ic_run_counts(const std::vector<SweepRow>& rows, TrustKind kind);

inline constexpr const char* kSweepHeader = "x,b,ic_mt,ic_bt,et_mt,et_bt";
inline constexpr const char* kCurveHeader = "x,best_b_mt,et_mt,best_b_bt,et_bt,et_fcfs,et_scf";

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);

/// Parses what write_sweep_csv / write_curve_csv produce. Throws ParseError.
std::vector<SweepRow> read_sweep_csv(std::istream& is);
std::vector<CurveRow> read_curve_csv(std::istream& is);

/// Six significant digits, as used in every CSV output.
std::string format_number(double v);

struct Preset {
  std::string name;
  std::string description;
  double lambda = 0.0;
  std::vector<double> sizes;
  std::vector<double> size_probs;
  /// Joint matrix at the preset's nominal error level.
  std::vector<std::vector<double>> matrix;

  SystemConfig config() const;
  SizeFamily family() const;
};

const std::vector<Preset>& presets();
/// Throws std::out_of_range for unknown names.
const Preset& find_preset(const std::string& name);

SystemConfig preset_example_3_1();

}  // namespace trustsched
