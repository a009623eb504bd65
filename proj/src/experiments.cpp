#include "qsync/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsync::experiments {

namespace {

int max_of(const std::vector<int>& v) {
  if (v.empty()) throw std::invalid_argument("empty n_early list");
  return *std::max_element(v.begin(), v.end());
}

knn::KnnModel fit(const sweep::Dataset& train, int k) {
  return knn::KnnModel::fit(train.feature_matrix(), train.targets(), k);
}

double score(const knn::KnnModel& model, const sweep::Dataset& test) {
  const auto targets = test.targets();
  return knn::evaluate(model, test.feature_matrix(), targets).report.mae;
}

using Patch = void (*)(sweep::SimulationBase&, Model, double);

void patch_init(sweep::SimulationBase& b, Model, double v) { b.init.p = 1.0 - v; }

void patch_temperature(sweep::SimulationBase& b, Model m, double v) {
  switch (m) {
    case Model::Lcm:
      b.lcm.env_p = v;
      b.lcm.validate();
      break;
    case Model::Gcm:
      b.gcm.env_p = v;
      b.gcm.validate();
      break;
    case Model::Me:
      b.me.n_bar = v;
      b.me.validate();
      break;
  }
}

void check_fractions(const std::vector<double>& one_minus_p) {
  for (double e : one_minus_p) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("1 - p must lie in [0, 1]");
  }
}

std::vector<ScanRow> rerun_scan(const Protocol& p, const sweep::Dataset& train, const std::vector<double>& values,
                                Patch patch) {
  if (train.manifest.model != p.model) throw std::invalid_argument("training set belongs to a different model");
  const int n_early = train.manifest.n_early;
  const auto model = fit(train, p.k);
  const auto grid = test_grid(p);
  std::vector<ScanRow> rows;
  for (double v : values) {
    sweep::SimulationBase base = p.base;
    patch(base, p.model, v);
    rows.push_back({v, score(model, sweep::build_dataset(p.model, grid, n_early, base, p.seed))});
  }
  return rows;
}

}  // namespace

sweep::SweepGrid training_grid(const Protocol& p) {
  const auto full = sweep::default_grid(p.model);
  return p.subsample == 1 ? full : sweep::subsample(full, p.subsample);
}

sweep::SweepGrid test_grid(const Protocol& p) {
  return sweep::perturb_grid(training_grid(p), p.eps_max, sweep::derive_seed(p.seed, kPerturbStream));
}

TrainTest train_test(const Protocol& p, int n_early) {
  return {sweep::build_dataset(p.model, training_grid(p), n_early, p.base, p.seed),
          sweep::build_dataset(p.model, test_grid(p), n_early, p.base, p.seed)};
}

knn::Evaluation fit_and_evaluate(const sweep::Dataset& train, const sweep::Dataset& test, int k) {
  if (train.manifest.model != test.manifest.model) {
    throw std::invalid_argument("train and test datasets come from different models");
  }
  if (train.manifest.n_early != test.manifest.n_early) {
    throw std::invalid_argument("train and test datasets have different n_early");
  }
  const auto targets = test.targets();
  return knn::evaluate(fit(train, k), test.feature_matrix(), targets);
}

std::vector<NoiseRow> noise_scan(const Protocol& p, const std::vector<int>& n_early_list,
                                 const std::vector<double>& rates, int repeats) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  return noise_scan(p, train_test(p, max_of(n_early_list)), n_early_list, rates, repeats);
}

std::vector<NoiseRow> noise_scan(const Protocol& p, const TrainTest& full, const std::vector<int>& n_early_list,
                                 const std::vector<double>& rates, int repeats) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (max_of(n_early_list) > full.train.manifest.n_early) {
    throw std::invalid_argument("noise_scan: datasets hold fewer early samples than requested");
  }
  const std::uint64_t noise_base = sweep::derive_seed(p.seed, kNoiseStream);

  std::vector<NoiseRow> rows;
  for (int n : n_early_list) {
    const auto train = sweep::truncate_features(full.train, n);
    const auto test = sweep::truncate_features(full.test, n);
    const auto model = fit(train, p.k);
    for (std::size_t r = 0; r < rates.size(); ++r) {
      std::vector<double> maes;
      for (int rep = 0; rep < repeats; ++rep) {
        const std::uint64_t stream =
            (static_cast<std::uint64_t>(n) << 32U) ^ (static_cast<std::uint64_t>(r) << 16U) ^ static_cast<std::uint64_t>(rep);
        maes.push_back(score(model, sweep::inject_noise(test, {rates[r], sweep::derive_seed(noise_base, stream)})));
      }
      double mean = 0.0;
      for (double m : maes) mean += m;
      mean /= static_cast<double>(maes.size());
      double var = 0.0;
      for (double m : maes) var += (m - mean) * (m - mean);
      rows.push_back({n, rates[r], mean, std::sqrt(var / static_cast<double>(maes.size())), repeats});
    }
  }
  return rows;
}

std::vector<ScanRow> init_error_scan(const Protocol& p, const std::vector<double>& one_minus_p, int n_early) {
  check_fractions(one_minus_p);
  return init_error_scan(p, sweep::build_dataset(p.model, training_grid(p), n_early, p.base, p.seed), one_minus_p);
}

std::vector<ScanRow> init_error_scan(const Protocol& p, const sweep::Dataset& train,
                                     const std::vector<double>& one_minus_p) {
  check_fractions(one_minus_p);
  return rerun_scan(p, train, one_minus_p, patch_init);
}

std::vector<ScanRow> temp_scan(const Protocol& p, const std::vector<double>& values, int n_early) {
  for (double v : values) {
    sweep::SimulationBase probe = p.base;
    patch_temperature(probe, p.model, v);
  }
  return temp_scan(p, sweep::build_dataset(p.model, training_grid(p), n_early, p.base, p.seed), values);
}

std::vector<ScanRow> temp_scan(const Protocol& p, const sweep::Dataset& train, const std::vector<double>& values) {
  return rerun_scan(p, train, values, patch_temperature);
}

}  // namespace qsync::experiments
