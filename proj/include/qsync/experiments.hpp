#pragma once

// Train/test protocols behind the CLI scans and the acceptance suite.
// Training always uses the unperturbed, noise-free grid; the test set is the
// same grid with every point shifted by a seeded epsilon.

#include <cstdint>
#include <vector>

#include "qsync/knn.hpp"
#include "qsync/sweep.hpp"

namespace qsync::experiments {

// Seed streams derived from the user seed.
inline constexpr std::uint64_t kPerturbStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;

struct Protocol {
  Model model = Model::Lcm;
  sweep::SimulationBase base;
  int subsample = 1;
  double eps_max = sweep::kDefaultEpsMax;
  std::uint64_t seed = 0;
  int k = knn::kDefaultK;
};

sweep::SweepGrid training_grid(const Protocol& p);
sweep::SweepGrid test_grid(const Protocol& p);

/// Clean train and perturbed test datasets with `n_early` sample pairs.
struct TrainTest {
  sweep::Dataset train;
  sweep::Dataset test;
};
TrainTest train_test(const Protocol& p, int n_early);

knn::Evaluation fit_and_evaluate(const sweep::Dataset& train, const sweep::Dataset& test, int k);

struct NoiseRow {
  int n_early = 0;
  double rate = 0.0;
  double mae = 0.0;      // mean over repeats
  double mae_std = 0.0;  // population spread over repeats
  int repeats = 1;
};

/// One clean-trained model per n_early; each rate perturbs the test features
/// `repeats` times with independent seeds.
std::vector<NoiseRow> noise_scan(const Protocol& p, const std::vector<int>& n_early_list,
                                 const std::vector<double>& rates, int repeats = 1);
/// Same, on prebuilt datasets whose n_early covers every entry of the list.
std::vector<NoiseRow> noise_scan(const Protocol& p, const TrainTest& data, const std::vector<int>& n_early_list,
                                 const std::vector<double>& rates, int repeats = 1);

struct ScanRow {
  double value = 0.0;
  double mae = 0.0;
};

/// Test trajectories restarted from the mixed preparation with 1 - p = value.
std::vector<ScanRow> init_error_scan(const Protocol& p, const std::vector<double>& one_minus_p, int n_early);
std::vector<ScanRow> init_error_scan(const Protocol& p, const sweep::Dataset& train,
                                     const std::vector<double>& one_minus_p);

/// Thermal environment: env_p for the collision models, n_bar for the
/// master equation.
std::vector<ScanRow> temp_scan(const Protocol& p, const std::vector<double>& values, int n_early);
std::vector<ScanRow> temp_scan(const Protocol& p, const sweep::Dataset& train, const std::vector<double>& values);

}  // namespace qsync::experiments
