#pragma once

// Domain types for the discrete size/estimate M/G/1 model.
//
// Size classes are indexed from 0 in code. A SizeGrid holds the ordered
// support z_0 < ... < z_{n-1}; a SizeEstimateMatrix holds the joint
// probability of (true size class, internal estimate class). Row index is
// the true size, column index the internal estimate.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trustsched {

enum class ErrorCode {
  EmptyGrid,
  NonPositiveSize,
  NonIncreasingSizes,
  DimensionMismatch,
  NegativeEntry,
  MatrixNotNormalized,
  BadLambda,
  Overloaded,
  BadProbability,
  BadErrorRate,
  UndefinedColumn,
  BadIndex,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Absolute tolerance used when checking that probabilities sum to one.
inline constexpr double kNormalizationTolerance = 1e-12;

class SizeGrid {
 public:
  /// Throws EmptyGrid, NonPositiveSize or NonIncreasingSizes.
  static SizeGrid create(std::vector<double> sizes);

  std::size_t size() const noexcept { return sizes_.size(); }
  double operator[](std::size_t i) const { return sizes_[i]; }
  std::span<const double> values() const noexcept { return sizes_; }
  double largest() const noexcept { return sizes_.back(); }

 private:
  explicit SizeGrid(std::vector<double> sizes) : sizes_(std::move(sizes)) {}
  std::vector<double> sizes_;
};

class SizeEstimateMatrix {
 public:
  /// Builds from row-major rows (rows = true size, columns = estimate).
  /// Sums within kNormalizationTolerance of 1 are renormalized; anything
  /// further off throws MatrixNotNormalized.
  static SizeEstimateMatrix create(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  /// S_i: probability the true size is class i.
  double size_marginal(std::size_t i) const;
  /// R_j: probability the internal estimate is class j.
  double estimate_marginal(std::size_t j) const;

  std::vector<double> size_marginals() const;
  std::vector<double> estimate_marginals() const;

  bool operator==(const SizeEstimateMatrix&) const = default;

 private:
  SizeEstimateMatrix(std::size_t n, std::vector<double> entries)
      : n_(n), entries_(std::move(entries)) {}
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Unvalidated input, as read from a config file or assembled by hand.
struct RawConfig {
  double lambda = 0.0;
  std::vector<double> sizes;
  std::vector<std::vector<double>> matrix;
};

/// Validated system: Poisson arrival rate, size grid and joint matrix with
/// load strictly below one. Immutable.
class SystemConfig {
 public:
  SystemConfig(double lambda, SizeGrid grid, SizeEstimateMatrix matrix);

  double lambda() const noexcept { return lambda_; }
  const SizeGrid& grid() const noexcept { return grid_; }
  const SizeEstimateMatrix& matrix() const noexcept { return matrix_; }
  std::size_t n() const noexcept { return grid_.size(); }

  double mean_size() const noexcept { return mean_size_; }
  double second_moment() const noexcept { return second_moment_; }
  double load() const noexcept { return lambda_ * mean_size_; }

 private:
  double lambda_;
  SizeGrid grid_;
  SizeEstimateMatrix matrix_;
  double mean_size_;
  double second_moment_;
};

/// Throws ModelError with the first violated invariant.
SystemConfig validate_config(const RawConfig& raw);

/// Each job's estimate is correct with probability 1 - x, otherwise uniform
/// over the other n - 1 classes.
SizeEstimateMatrix uniform_error_matrix(std::span<const double> size_dist,
                                        const SizeGrid& grid, double error_rate);

SizeEstimateMatrix diagonal_matrix(std::span<const double> size_dist, const SizeGrid& grid);

enum class PolicyKind { MeasuredTrust, BlindTrust, Fcfs, Scf };

/// The two estimate-aware policies; the engine and incentive code only
/// accept these.
enum class TrustKind { MeasuredTrust, BlindTrust };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(TrustKind kind);
PolicyKind to_policy(TrustKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::Fcfs;
  /// Punishment probability; ignored by the blind policies.
  double punishment = 0.0;

  static PolicySpec make(PolicyKind kind, double punishment = 0.0);
  bool is_trust() const noexcept {
    return kind == PolicyKind::MeasuredTrust || kind == PolicyKind::BlindTrust;
  }
  TrustKind trust_kind() const;
};

void check_probability(double p, std::string_view what);

}  // namespace trustsched
