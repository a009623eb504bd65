#include "qsync/knn.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qsync/common.hpp"
#include "qsync/parallel.hpp"
#include "qsync/textio.hpp"

namespace qsync::knn {

namespace {

constexpr int kModelFormatVersion = 1;

// (distance, index) lexicographic order.
bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.index < b.index;
}

}  // namespace

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  FeatureMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw std::invalid_argument("feature row " + std::to_string(i) + " has width " +
                                  std::to_string(rows[i].size()) + ", expected " + std::to_string(cols));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

KnnModel KnnModel::fit(FeatureMatrix features, std::vector<double> targets, int k) {
  if (k < 1) throw std::invalid_argument("knn fit: k must be >= 1");
  if (features.rows() != targets.size()) {
    throw std::invalid_argument("knn fit: " + std::to_string(features.rows()) + " rows but " +
                                std::to_string(targets.size()) + " targets");
  }
  if (static_cast<std::size_t>(k) > targets.size()) {
    throw std::invalid_argument("knn fit: k = " + std::to_string(k) + " exceeds training size " +
                                std::to_string(targets.size()));
  }
  return KnnModel(std::move(features), std::move(targets), k);
}

std::vector<Neighbor> KnnModel::neighbors(std::span<const double> x) const {
  const std::size_t d = width();
  if (x.size() != d) {
    throw std::invalid_argument("knn predict: query width " + std::to_string(x.size()) + ", model width " +
                                std::to_string(d));
  }
  const auto kk = static_cast<std::size_t>(k_);
  // Sorted best-first; the last entry is the current k-th neighbor.
  std::vector<Neighbor> best;
  best.reserve(kk + 1);
  double bound = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < size(); ++i) {
    const auto row = features_.row(i);
    double dist = 0.0;
    std::size_t c = 0;
    for (; c < d; ++c) {
      const double diff = row[c] - x[c];
      dist += diff * diff;
      // partial sums only grow, so a row already past the bound cannot enter
      if (dist > bound) break;
    }
    if (c < d) continue;
    const Neighbor cand{i, dist};
    if (best.size() == kk && !closer(cand, best.back())) continue;
    best.insert(std::upper_bound(best.begin(), best.end(), cand, closer), cand);
    if (best.size() > kk) best.pop_back();
    if (best.size() == kk) bound = best.back().squared_distance;
  }
  return best;
}

double KnnModel::predict(std::span<const double> x) const {
  const auto nn = neighbors(x);
  double sum = 0.0;
  for (const auto& n : nn) sum += targets_[n.index];
  return sum / static_cast<double>(nn.size());
}

Evaluation evaluate(const KnnModel& model, const FeatureMatrix& test_features, std::span<const double> test_targets) {
  if (test_features.rows() != test_targets.size()) {
    throw std::invalid_argument("knn evaluate: feature rows and targets differ in count");
  }
  if (test_features.cols() != model.width()) {
    throw std::invalid_argument("knn evaluate: test width " + std::to_string(test_features.cols()) +
                                " does not match model width " + std::to_string(model.width()));
  }
  Evaluation out;
  out.predictions.assign(test_features.rows(), 0.0);
  parallel_for(test_features.rows(), [&](std::size_t i) { out.predictions[i] = model.predict(test_features.row(i)); });
  out.report = metrics::mae(test_targets, out.predictions);
  return out;
}

void save_model(const KnnModel& model, const std::filesystem::path& path) {
  std::ostringstream csv;
  for (std::size_t c = 0; c < model.width(); ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "feat_%04zu,", c);
    csv << name;
  }
  csv << "target\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (double v : model.features().row(i)) csv << textio::format_double(v) << ',';
    csv << textio::format_double(model.targets()[i]) << '\n';
  }
  textio::write_text(path, csv.str());

  nlohmann::json manifest;
  manifest["format_version"] = kModelFormatVersion;
  manifest["kind"] = "knn_model";
  manifest["k"] = model.k();
  manifest["distance"] = "euclidean";
  manifest["weights"] = "uniform";
  manifest["n_train"] = model.size();
  manifest["width"] = model.width();
  textio::write_json(textio::manifest_path(path), manifest);
}

KnnModel load_model(const std::filesystem::path& path) {
  const nlohmann::json manifest = textio::read_json(textio::manifest_path(path));
  if (manifest.value("format_version", -1) != kModelFormatVersion || manifest.value("kind", "") != "knn_model") {
    throw FormatError("'" + path.string() + "' is not a version " + std::to_string(kModelFormatVersion) +
                      " knn model");
  }
  const std::size_t width = manifest.at("width").get<std::size_t>();
  const std::string text = textio::read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file");
  if (textio::split_commas(line).size() != width + 1) throw FormatError("model header width mismatch");

  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = textio::split_commas(line);
    if (fields.size() != width + 1) throw FormatError("model row with wrong column count");
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < width; ++c) row.push_back(textio::parse_double(fields[c]));
    rows.push_back(std::move(row));
    targets.push_back(textio::parse_double(fields[width]));
  }
  return KnnModel::fit(FeatureMatrix::from_rows(rows), std::move(targets), manifest.at("k").get<int>());
}

}  // namespace qsync::knn
