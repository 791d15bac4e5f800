#include "trustsched/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace trustsched {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NonPositiveSize: return "NonPositiveSize";
    case ErrorCode::NonIncreasingSizes: return "NonIncreasingSizes";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::MatrixNotNormalized: return "MatrixNotNormalized";
    case ErrorCode::BadLambda: return "BadLambda";
    case ErrorCode::Overloaded: return "Overloaded";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::BadErrorRate: return "BadErrorRate";
    case ErrorCode::UndefinedColumn: return "UndefinedColumn";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& detail) {
  std::ostringstream os;
  os << to_string(code) << ": " << detail;
  throw ModelError(code, os.str());
}

// Validates a probability vector of length n and returns it renormalized.
std::vector<double> normalized_distribution(std::span<const double> dist, std::size_t n) {
  if (dist.size() != n) {
    fail(ErrorCode::DimensionMismatch, "size distribution has " + std::to_string(dist.size()) +
                                           " entries, grid has " + std::to_string(n));
  }
  double total = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < 0.0) fail(ErrorCode::NegativeEntry, "size probability < 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    fail(ErrorCode::MatrixNotNormalized, "size probabilities sum to " + std::to_string(total));
  }
  std::vector<double> out(dist.begin(), dist.end());
  for (double& p : out) p /= total;
  return out;
}

}  // namespace

SizeGrid SizeGrid::create(std::vector<double> sizes) {
  if (sizes.empty()) fail(ErrorCode::EmptyGrid, "size grid is empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!std::isfinite(sizes[i]) || sizes[i] <= 0.0) {
      fail(ErrorCode::NonPositiveSize, "size " + std::to_string(i + 1) + " is not positive");
    }
    if (i > 0 && !(sizes[i - 1] < sizes[i])) {
      fail(ErrorCode::NonIncreasingSizes,
           "sizes must be strictly increasing (position " + std::to_string(i + 1) + ")");
    }
  }
  return SizeGrid(std::move(sizes));
}

SizeEstimateMatrix SizeEstimateMatrix::create(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorCode::EmptyGrid, "matrix has no rows");
  std::vector<double> entries;
  entries.reserve(n * n);
  double total = 0.0;
  for (const auto& row : rows) {
    if (row.size() != n) fail(ErrorCode::DimensionMismatch, "matrix must be square");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::NegativeEntry, "matrix entry < 0");
      entries.push_back(v);
      total += v;
    }
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    fail(ErrorCode::MatrixNotNormalized, "matrix entries sum to " + std::to_string(total));
  }
  for (double& v : entries) v /= total;
  return SizeEstimateMatrix(n, std::move(entries));
}

double SizeEstimateMatrix::size_marginal(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double SizeEstimateMatrix::estimate_marginal(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

std::vector<double> SizeEstimateMatrix::size_marginals() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = size_marginal(i);
  return out;
}

std::vector<double> SizeEstimateMatrix::estimate_marginals() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = estimate_marginal(j);
  return out;
}

SystemConfig::SystemConfig(double lambda, SizeGrid grid, SizeEstimateMatrix matrix)
    : lambda_(lambda), grid_(std::move(grid)), matrix_(std::move(matrix)) {
  if (!std::isfinite(lambda_) || lambda_ <= 0.0) {
    fail(ErrorCode::BadLambda, "arrival rate must be positive and finite");
  }
  if (grid_.size() != matrix_.size()) {
    fail(ErrorCode::DimensionMismatch, "matrix dimension does not match the size grid");
  }
  mean_size_ = 0.0;
  second_moment_ = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double p = matrix_.size_marginal(i);
    mean_size_ += p * grid_[i];
    second_moment_ += p * grid_[i] * grid_[i];
  }
  if (load() >= 1.0) {
    fail(ErrorCode::Overloaded, "load " + std::to_string(load()) + " is not below 1");
  }
}

SystemConfig validate_config(const RawConfig& raw) {
  if (!std::isfinite(raw.lambda) || raw.lambda <= 0.0) {
    fail(ErrorCode::BadLambda, "arrival rate must be positive and finite");
  }
  auto grid = SizeGrid::create(raw.sizes);
  if (raw.matrix.size() != grid.size()) {
    fail(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(raw.matrix.size()) +
                                           " rows, grid has " + std::to_string(grid.size()));
  }
  auto matrix = SizeEstimateMatrix::create(raw.matrix);
  return SystemConfig(raw.lambda, std::move(grid), std::move(matrix));
}

SizeEstimateMatrix uniform_error_matrix(std::span<const double> size_dist, const SizeGrid& grid,
                                        double error_rate) {
  const std::size_t n = grid.size();
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    fail(ErrorCode::BadErrorRate, "error rate must lie in [0, 1]");
  }
  if (n == 1 && error_rate > 0.0) {
    fail(ErrorCode::BadErrorRate, "a single size class has no wrong estimate to draw");
  }
  const auto dist = normalized_distribution(size_dist, n);
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double off = n > 1 ? dist[i] * error_rate / static_cast<double>(n - 1) : 0.0;
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = (i == j) ? dist[i] * (1.0 - error_rate) : off;
  }
  return SizeEstimateMatrix::create(rows);
}

SizeEstimateMatrix diagonal_matrix(std::span<const double> size_dist, const SizeGrid& grid) {
  return uniform_error_matrix(size_dist, grid, 0.0);
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::MeasuredTrust: return "MeasuredTrust";
    case PolicyKind::BlindTrust: return "BlindTrust";
    case PolicyKind::Fcfs: return "FCFS";
    case PolicyKind::Scf: return "SCF";
  }
  return "Unknown";
}

std::string_view to_string(TrustKind kind) { return to_string(to_policy(kind)); }

PolicyKind to_policy(TrustKind kind) {
  return kind == TrustKind::MeasuredTrust ? PolicyKind::MeasuredTrust : PolicyKind::BlindTrust;
}

void check_probability(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::BadProbability, std::string(what) + " must lie in [0, 1]");
  }
}

PolicySpec PolicySpec::make(PolicyKind kind, double punishment) {
  check_probability(punishment, "punishment probability");
  return PolicySpec{kind, punishment};
}

TrustKind PolicySpec::trust_kind() const {
  switch (kind) {
    case PolicyKind::MeasuredTrust: return TrustKind::MeasuredTrust;
    case PolicyKind::BlindTrust: return TrustKind::BlindTrust;
    default: break;
  }
  throw std::logic_error("blind policy has no trust kind");
}

}  // namespace trustsched
