#pragma once

// JSON system configuration files. Two shapes are accepted:
//
//   {"lambda": 0.5, "sizes": [1, 2, 3], "matrix": [[...], [...], [...]]}
//   {"lambda": 0.8, "sizes": [...], "size_probs": [...], "error_rate": 0.1}
//
// Matrix rows are true sizes, columns internal estimates. The second form
// builds the matrix with uniform_error_matrix.

#include <string>
#include <string_view>

#include "trustsched/experiments.hpp"
#include "trustsched/model.hpp"

namespace trustsched {

SystemConfig parse_config(std::string_view json_text);
SystemConfig load_config(const std::string& path);

/// Size distribution and arrival rate for sweeps. A matrix-form document
/// contributes its row marginals; error_rate is ignored.
SizeFamily parse_family(std::string_view json_text);
SizeFamily load_family(const std::string& path);

}  // namespace trustsched
