#pragma once

// Parameter grids, grid-point simulation, dataset construction, noise
// injection and dataset persistence.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsync/collision.hpp"
#include "qsync/common.hpp"
#include "qsync/knn.hpp"
#include "qsync/lindblad.hpp"

namespace qsync::sweep {

inline constexpr int kFormatVersion = 1;
inline constexpr int kDefaultWindow = 100;
inline constexpr double kDefaultEpsMax = 1e-4;
inline constexpr double kPaperNoiseRateMax = 0.05;

/// Swept parameters of one configuration. `lam` is unused by the master
/// equation, `j` only by the local collision model and `f12` only by the
/// master equation.
struct GridPoint {
  double omega_ratio = 1.0;
  double lam = 0.0;
  double j = 0.0;
  double f12 = 0.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Dataset column names for the swept parameters of a model.
std::vector<std::string> parameter_names(Model model);
std::vector<double> parameter_values(Model model, const GridPoint& point);
GridPoint point_from_values(Model model, const std::vector<double>& values);

struct GridAxis {
  std::string name;
  double start = 0.0;
  double step = 0.0;
  int count = 0;

  double value(int i) const { return start + step * static_cast<double>(i); }
};

struct Perturbation {
  double eps_max = 0.0;
  std::uint64_t seed = 0;
};

/// Ordered grid; point i has grid index i.
struct SweepGrid {
  Model model = Model::Lcm;
  std::vector<GridAxis> axes;
  int subsample = 1;
  std::optional<Perturbation> perturbation;
  std::vector<GridPoint> points;

  std::size_t size() const noexcept { return points.size(); }

  /// Axis definitions, subsampling and perturbation as a JSON tree.
  nlohmann::json spec() const;
};

/// 41 detuning x 25 lambda x 10 J = 10,250 points.
SweepGrid lcm_grid();
/// 76 detuning x 51 lambda = 3876 points.
SweepGrid gcm_grid();
/// 101 detuning x 51 f12 = 5151 points.
SweepGrid me_grid();
SweepGrid default_grid(Model model);

/// Keeps every `every`-th index along each axis of an axis-generated grid.
SweepGrid subsample(const SweepGrid& grid, int every);

/// Adds independent uniform offsets in (-eps_max, eps_max) to the detuning
/// and to lambda (collision models) or f12 (master equation) of every point.
SweepGrid perturb_grid(const SweepGrid& grid, double eps_max, std::uint64_t seed);

/// Seeded 64-bit generator; uniform doubles use the top 53 bits so streams
/// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr const char* kName = "mt19937_64";

  /// [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }
  /// [-1, 1)
  double symmetric() { return 2.0 * uniform01() - 1.0; }
  /// (-half_width, half_width)
  double symmetric_open(double half_width);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 mix of a base seed with a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct InitialStateSpec {
  double p = 1.0;             // probability of the intended preparation
  double branch_split = 0.5;  // share of the error weight on the second qubit
};

/// Fixed (non-swept) parameters of every run.
struct SimulationBase {
  collision::CollisionConfig lcm;
  collision::CollisionConfig gcm;
  lindblad::MeConfig me;
  InitialStateSpec init;
  int window = kDefaultWindow;

  nlohmann::json to_json(Model model) const;
};

collision::CollisionConfig collision_config_for(const SimulationBase& base, Model model, const GridPoint& point);
lindblad::MeConfig me_config_for(const SimulationBase& base, const GridPoint& point);
qdyn::DensityMatrix initial_state_for(Model model, const InitialStateSpec& spec);

/// Number of recorded samples after the initial state.
std::size_t run_length(const SimulationBase& base, Model model);

/// One-step linear map for a grid point.
dyn::StepMap step_map_for(const SimulationBase& base, Model model, const GridPoint& point);

/// The full trajectory of one configuration (ME includes the t = 0 sample).
Trajectory simulate_point(const SimulationBase& base, Model model, const GridPoint& point);

struct PointResult {
  std::vector<double> head;  // interleaved sx1, sx2 for the first n_head samples
  double target = 0.0;
  bool undefined_target = false;
};

/// Early samples and late-window targets for every grid point.
struct GridSimulation {
  SweepGrid grid;
  SimulationBase base;
  int n_head = 0;
  std::vector<PointResult> results;

  std::vector<std::size_t> undefined_targets() const;
};

/// Simulates all points in parallel; output order is grid order. A constant
/// late window gets target 0 and is listed in undefined_targets(). Throws
/// SimulationError naming the failing grid index.
GridSimulation simulate_grid(const SweepGrid& grid, const SimulationBase& base, int n_head);

struct NoiseSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct DatasetRecord {
  std::size_t grid_index = 0;
  GridPoint params;
  std::vector<double> features;  // sx1_1, sx2_1, sx1_2, sx2_2, ...
  double target = 0.0;
};

struct DatasetManifest {
  int format_version = kFormatVersion;
  Model model = Model::Lcm;
  nlohmann::json model_config;
  nlohmann::json grid_spec;
  int n_early = 0;
  int window = kDefaultWindow;
  std::uint64_t seed = 0;
  std::string prng = Rng::kName;
  std::vector<std::size_t> undefined_targets;
  std::optional<NoiseSpec> noise;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetRecord> records;

  knn::FeatureMatrix feature_matrix() const;
  std::vector<double> targets() const;
};

Dataset make_dataset(const GridSimulation& sim, int n_early, std::uint64_t seed);

/// simulate_grid followed by make_dataset.
Dataset build_dataset(Model model, const SweepGrid& grid, int n_early, const SimulationBase& base,
                      std::uint64_t seed = 0);

/// Keeps the first n_early sample pairs of every record.
Dataset truncate_features(const Dataset& ds, int n_early);

/// x -> x + rate * u, u ~ U[-1, 1] drawn independently per feature in
/// record order. Targets are untouched and values are not clamped.
Dataset inject_noise(const Dataset& ds, const NoiseSpec& spec);

/// Writes `path` (delimited text) and its manifest alongside.
void save(const Dataset& ds, const std::filesystem::path& path);

/// Throws FormatError on a wrong column count, malformed number, or
/// format-version mismatch.
Dataset load(const std::filesystem::path& path);

}  // namespace qsync::sweep
