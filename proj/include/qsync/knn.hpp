#pragma once

// Brute-force k-nearest-neighbors regression with Euclidean distance,
// uniform averaging and no feature scaling.

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "qsync/sync_metrics.hpp"

namespace qsync::knn {

inline constexpr int kDefaultK = 5;

/// Row-major N x D feature table.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  /// Throws std::invalid_argument on ragged rows.
  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Neighbor {
  std::size_t index;
  double squared_distance;
};

class KnnModel {
 public:
  /// Stores the training set verbatim. Throws std::invalid_argument if
  /// k < 1, k > N, or targets and rows disagree in count.
  static KnnModel fit(FeatureMatrix features, std::vector<double> targets, int k = kDefaultK);

  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return targets_.size(); }
  std::size_t width() const noexcept { return features_.cols(); }
  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<double>& targets() const noexcept { return targets_; }

  /// The k closest training rows ordered by (distance, row index).
  std::vector<Neighbor> neighbors(std::span<const double> x) const;

  /// Unweighted mean of the k nearest targets; ties at the k-th distance go
  /// to the lowest training-row index. Throws std::invalid_argument on a
  /// width mismatch.
  double predict(std::span<const double> x) const;

 private:
  KnnModel(FeatureMatrix features, std::vector<double> targets, int k)
      : features_(std::move(features)), targets_(std::move(targets)), k_(k) {}

  FeatureMatrix features_;
  std::vector<double> targets_;
  int k_ = kDefaultK;
};

struct Evaluation {
  std::vector<double> predictions;
  metrics::EvalReport report;
};

/// Predicts every test row (in parallel) and scores against test_targets.
Evaluation evaluate(const KnnModel& model, const FeatureMatrix& test_features, std::span<const double> test_targets);

/// Training rows as delimited text plus a JSON manifest holding k.
void save_model(const KnnModel& model, const std::filesystem::path& path);
KnnModel load_model(const std::filesystem::path& path);

}  // namespace qsync::knn
