#pragma once

#include <string>
#include <vector>

#include "trustsched/experiments.hpp"

namespace trustsched::tools {

/// IC region chart: error rate on x, punishment on y, one translucent fill
/// per policy.
std::string render_sweep_svg(const std::vector<SweepRow>& rows);

/// Mean response vs error rate: MeasuredTrust, BlindTrust, FCFS, SCF.
std::string render_curve_svg(const std::vector<CurveRow>& rows);

}  // namespace trustsched::tools
