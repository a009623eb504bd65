#include "qsync/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qsync/parallel.hpp"
#include "qsync/sync_metrics.hpp"
#include "qsync/textio.hpp"

namespace qsync::sweep {

namespace {

// Snaps start + i*step onto the nearest 12-decimal value so grid values
// print as their nominal decimals.
double snap(double v) { return std::round(v * 1e12) / 1e12; }

SweepGrid make_grid(Model model, std::vector<GridAxis> axes, int every) {
  if (every < 1) throw std::invalid_argument("subsample factor must be >= 1");
  SweepGrid grid;
  grid.model = model;
  grid.axes = std::move(axes);
  grid.subsample = every;

  std::vector<std::vector<double>> values;
  for (const auto& axis : grid.axes) {
    std::vector<double> v;
    for (int i = 0; i < axis.count; i += every) v.push_back(snap(axis.value(i)));
    values.push_back(std::move(v));
  }

  std::vector<std::size_t> idx(values.size(), 0);
  const auto names = parameter_names(model);
  while (true) {
    std::vector<double> tuple;
    for (std::size_t a = 0; a < values.size(); ++a) tuple.push_back(values[a][idx[a]]);
    grid.points.push_back(point_from_values(model, tuple));
    // odometer increment, last axis fastest
    std::size_t a = values.size();
    while (a > 0) {
      --a;
      if (++idx[a] < values[a].size()) break;
      idx[a] = 0;
      if (a == 0) return grid;
    }
  }
}

std::string feature_name(std::size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "feat_%04zu", c);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

nlohmann::json collision_json(const collision::CollisionConfig& c) {
  return {{"omega2", c.omega2}, {"j", c.j},         {"lam", c.lam},
          {"dt_s", c.dt_s},     {"dt_ss", c.dt_ss}, {"dt_se", c.dt_se},
          {"n_collisions", c.n_collisions},         {"env_p", c.env_p}};
}

nlohmann::json me_json(const lindblad::MeConfig& c) {
  return {{"omega2", c.omega2}, {"f12", c.f12},     {"g", c.g},
          {"a12", c.a12},       {"n_bar", c.n_bar}, {"t_max", c.t_max},
          {"sample_dt", c.sample_dt}};
}

}  // namespace

std::vector<std::string> parameter_names(Model model) {
  switch (model) {
    case Model::Lcm:
      return {"omega_ratio", "lambda", "j"};
    case Model::Gcm:
      return {"omega_ratio", "lambda"};
    case Model::Me:
      return {"omega_ratio", "f12"};
  }
  return {};
}

std::vector<double> parameter_values(Model model, const GridPoint& p) {
  switch (model) {
    case Model::Lcm:
      return {p.omega_ratio, p.lam, p.j};
    case Model::Gcm:
      return {p.omega_ratio, p.lam};
    case Model::Me:
      return {p.omega_ratio, p.f12};
  }
  return {};
}

GridPoint point_from_values(Model model, const std::vector<double>& v) {
  if (v.size() != parameter_names(model).size()) {
    throw std::invalid_argument("point_from_values: wrong parameter count for model");
  }
  GridPoint p;
  p.omega_ratio = v[0];
  switch (model) {
    case Model::Lcm:
      p.lam = v[1];
      p.j = v[2];
      break;
    case Model::Gcm:
      p.lam = v[1];
      break;
    case Model::Me:
      p.f12 = v[1];
      break;
  }
  return p;
}

nlohmann::json SweepGrid::spec() const {
  nlohmann::json j;
  j["model"] = std::string(to_string(model));
  j["axes"] = nlohmann::json::array();
  for (const auto& a : axes) {
    j["axes"].push_back({{"name", a.name}, {"start", a.start}, {"step", a.step}, {"count", a.count}});
  }
  j["subsample"] = subsample;
  j["size"] = points.size();
  if (perturbation) {
    j["perturbation"] = {{"eps_max", perturbation->eps_max}, {"seed", perturbation->seed}};
  } else {
    j["perturbation"] = nullptr;
  }
  return j;
}

SweepGrid lcm_grid() {
  return make_grid(Model::Lcm, {{"omega_ratio", 0.97, 0.0015, 41}, {"lambda", 0.01, 0.002, 25}, {"j", 0.05, 0.01, 10}},
                   1);
}

SweepGrid gcm_grid() {
  return make_grid(Model::Gcm, {{"omega_ratio", 0.93, 0.002, 76}, {"lambda", 0.0, 0.0002, 51}}, 1);
}

SweepGrid me_grid() { return make_grid(Model::Me, {{"omega_ratio", 1.0, 0.001, 101}, {"f12", 0.0, 0.001, 51}}, 1); }

SweepGrid default_grid(Model model) {
  switch (model) {
    case Model::Lcm:
      return lcm_grid();
    case Model::Gcm:
      return gcm_grid();
    case Model::Me:
      return me_grid();
  }
  throw std::invalid_argument("default_grid: unknown model");
}

SweepGrid subsample(const SweepGrid& grid, int every) {
  if (grid.perturbation || grid.subsample != 1) {
    throw std::invalid_argument("subsample: grid must be an unperturbed, unsubsampled axis grid");
  }
  return make_grid(grid.model, grid.axes, every);
}

double Rng::symmetric_open(double half_width) {
  double u = 0.0;
  do {
    u = uniform01();
  } while (u == 0.0);
  return (2.0 * u - 1.0) * half_width;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) { return splitmix64(base ^ splitmix64(stream)); }

SweepGrid perturb_grid(const SweepGrid& grid, double eps_max, std::uint64_t seed) {
  if (!(eps_max >= 0.0)) throw std::invalid_argument("perturb_grid: eps_max must be non-negative");
  SweepGrid out = grid;
  out.perturbation = Perturbation{eps_max, seed};
  Rng rng(seed);
  for (auto& p : out.points) {
    const double d_ratio = rng.symmetric_open(eps_max);
    const double d_coupling = rng.symmetric_open(eps_max);
    p.omega_ratio += d_ratio;
    if (grid.model == Model::Me) {
      p.f12 += d_coupling;
    } else {
      p.lam += d_coupling;
    }
  }
  return out;
}

nlohmann::json SimulationBase::to_json(Model model) const {
  nlohmann::json j;
  j["model"] = std::string(to_string(model));
  switch (model) {
    case Model::Lcm:
      j["fixed"] = collision_json(lcm);
      break;
    case Model::Gcm:
      j["fixed"] = collision_json(gcm);
      break;
    case Model::Me:
      j["fixed"] = me_json(me);
      break;
  }
  j["initial_state"] = {{"p", init.p}, {"branch_split", init.branch_split}};
  j["window"] = window;
  return j;
}

collision::CollisionConfig collision_config_for(const SimulationBase& base, Model model, const GridPoint& point) {
  if (model == Model::Me) throw std::invalid_argument("collision_config_for: not a collision model");
  collision::CollisionConfig cfg = model == Model::Lcm ? base.lcm : base.gcm;
  cfg.omega1 = point.omega_ratio * cfg.omega2;
  cfg.lam = point.lam;
  if (model == Model::Lcm) cfg.j = point.j;
  return cfg;
}

lindblad::MeConfig me_config_for(const SimulationBase& base, const GridPoint& point) {
  lindblad::MeConfig cfg = base.me;
  cfg.omega1 = point.omega_ratio * cfg.omega2;
  cfg.f12 = point.f12;
  return cfg;
}

qdyn::DensityMatrix initial_state_for(Model model, const InitialStateSpec& spec) {
  if (model == Model::Me) {
    return collision::error_mixture(lindblad::ideal_qubit1(), lindblad::ideal_qubit2(), spec.p, spec.branch_split);
  }
  return collision::initial_state(spec.p, spec.branch_split);
}

std::size_t run_length(const SimulationBase& base, Model model) {
  switch (model) {
    case Model::Lcm:
      return static_cast<std::size_t>(base.lcm.n_collisions);
    case Model::Gcm:
      return static_cast<std::size_t>(base.gcm.n_collisions);
    case Model::Me:
      return base.me.n_steps();
  }
  return 0;
}

dyn::StepMap step_map_for(const SimulationBase& base, Model model, const GridPoint& point) {
  if (model == Model::Me) {
    const auto cfg = me_config_for(base, point);
    return lindblad::propagator(lindblad::liouvillian(cfg), cfg.sample_dt);
  }
  return collision::cycle_map(model, collision_config_for(base, model, point));
}

Trajectory simulate_point(const SimulationBase& base, Model model, const GridPoint& point) {
  const auto rho0 = initial_state_for(model, base.init);
  if (model == Model::Me) return lindblad::propagate(rho0, me_config_for(base, point));
  return collision::simulate_collisions(model, collision_config_for(base, model, point), rho0);
}

std::vector<std::size_t> GridSimulation::undefined_targets() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].undefined_target) out.push_back(i);
  return out;
}

GridSimulation simulate_grid(const SweepGrid& grid, const SimulationBase& base, int n_head) {
  const Model model = grid.model;
  const std::size_t n_steps = run_length(base, model);
  if (n_head < 1 || static_cast<std::size_t>(n_head) > n_steps) {
    throw std::invalid_argument("simulate_grid: n_early must lie in [1, " + std::to_string(n_steps) + "]");
  }
  if (base.window < 2 || static_cast<std::size_t>(base.window) > n_steps) {
    throw std::invalid_argument("simulate_grid: target window must lie in [2, run length]");
  }

  GridSimulation sim;
  sim.grid = grid;
  sim.base = base;
  sim.n_head = n_head;
  sim.results.resize(grid.size());

  const dyn::Vec16 v0 = dyn::vectorize(initial_state_for(model, base.init));
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      const dyn::StepMap step = step_map_for(base, model, grid.points[i]);
      const auto w = dyn::run_windows(step, v0, n_steps, static_cast<std::size_t>(n_head),
                                      static_cast<std::size_t>(base.window));
      PointResult r;
      r.head.reserve(2 * w.head_sx1.size());
      for (std::size_t s = 0; s < w.head_sx1.size(); ++s) {
        r.head.push_back(w.head_sx1[s]);
        r.head.push_back(w.head_sx2[s]);
      }
      try {
        r.target = metrics::pearson(w.tail_sx1, w.tail_sx2);
      } catch (const UndefinedCorrelation&) {
        r.target = 0.0;
        r.undefined_target = true;
      }
      sim.results[i] = std::move(r);
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(i, e.what());
    }
  });
  return sim;
}

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json j;
  j["format_version"] = format_version;
  j["model"] = std::string(qsync::to_string(model));
  j["model_config"] = model_config;
  j["grid"] = grid_spec;
  j["n_early"] = n_early;
  j["window"] = window;
  j["seed"] = seed;
  j["prng"] = prng;
  j["undefined_targets"] = undefined_targets;
  if (noise) {
    j["noise"] = {{"rate", noise->rate}, {"seed", noise->seed}};
  } else {
    j["noise"] = nullptr;
  }
  return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw FormatError("dataset format version " + std::to_string(m.format_version) + " (expected " +
                        std::to_string(kFormatVersion) + ")");
    }
    m.model = parse_model(j.at("model").get<std::string>());
    m.model_config = j.at("model_config");
    m.grid_spec = j.at("grid");
    m.n_early = j.at("n_early").get<int>();
    m.window = j.at("window").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.prng = j.at("prng").get<std::string>();
    m.undefined_targets = j.at("undefined_targets").get<std::vector<std::size_t>>();
    if (j.contains("noise") && !j.at("noise").is_null()) {
      m.noise = NoiseSpec{j.at("noise").at("rate").get<double>(), j.at("noise").at("seed").get<std::uint64_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed dataset manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed dataset manifest: ") + e.what());
  }
  return m;
}

knn::FeatureMatrix Dataset::feature_matrix() const {
  const std::size_t width = records.empty() ? 0 : records.front().features.size();
  knn::FeatureMatrix m(records.size(), width);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != width) throw std::invalid_argument("dataset has ragged feature rows");
    std::copy(records[i].features.begin(), records[i].features.end(), m.row(i).begin());
  }
  return m;
}

std::vector<double> Dataset::targets() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.target);
  return t;
}

Dataset make_dataset(const GridSimulation& sim, int n_early, std::uint64_t seed) {
  if (n_early < 1 || n_early > sim.n_head) {
    throw std::invalid_argument("make_dataset: n_early must lie in [1, " + std::to_string(sim.n_head) + "]");
  }
  Dataset ds;
  ds.manifest.model = sim.grid.model;
  ds.manifest.model_config = sim.base.to_json(sim.grid.model);
  ds.manifest.grid_spec = sim.grid.spec();
  ds.manifest.n_early = n_early;
  ds.manifest.window = sim.base.window;
  ds.manifest.seed = seed;
  ds.manifest.undefined_targets = sim.undefined_targets();
  ds.records.reserve(sim.results.size());
  for (std::size_t i = 0; i < sim.results.size(); ++i) {
    const auto& r = sim.results[i];
    DatasetRecord rec;
    rec.grid_index = i;
    rec.params = sim.grid.points[i];
    rec.features.assign(r.head.begin(), r.head.begin() + 2 * n_early);
    rec.target = r.target;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

Dataset build_dataset(Model model, const SweepGrid& grid, int n_early, const SimulationBase& base,
                      std::uint64_t seed) {
  if (grid.model != model) throw std::invalid_argument("build_dataset: grid belongs to a different model");
  return make_dataset(simulate_grid(grid, base, n_early), n_early, seed);
}

Dataset truncate_features(const Dataset& ds, int n_early) {
  if (n_early < 1 || n_early > ds.manifest.n_early) {
    throw std::invalid_argument("truncate_features: n_early must lie in [1, " +
                                std::to_string(ds.manifest.n_early) + "]");
  }
  Dataset out = ds;
  out.manifest.n_early = n_early;
  for (auto& r : out.records) r.features.resize(2 * static_cast<std::size_t>(n_early));
  return out;
}

Dataset inject_noise(const Dataset& ds, const NoiseSpec& spec) {
  if (!(spec.rate >= 0.0)) throw std::invalid_argument("inject_noise: rate must be non-negative");
  Dataset out = ds;
  out.manifest.noise = spec;
  if (spec.rate == 0.0) return out;
  Rng rng(spec.seed);
  for (auto& r : out.records)
    for (auto& x : r.features) x += spec.rate * rng.symmetric();
  return out;
}

void save(const Dataset& ds, const std::filesystem::path& path) {
  const auto names = parameter_names(ds.manifest.model);
  const std::size_t width = 2 * static_cast<std::size_t>(ds.manifest.n_early);
  std::ostringstream out;
  out << "grid_index";
  for (const auto& n : names) out << ',' << n;
  for (std::size_t c = 0; c < width; ++c) out << ',' << feature_name(c);
  out << ",target_c12\n";
  for (const auto& r : ds.records) {
    if (r.features.size() != width) throw std::invalid_argument("save: record width disagrees with manifest");
    out << r.grid_index;
    for (double v : parameter_values(ds.manifest.model, r.params)) out << ',' << textio::format_double(v);
    for (double v : r.features) out << ',' << textio::format_double(v);
    out << ',' << textio::format_double(r.target) << '\n';
  }
  textio::write_text(path, out.str());
  textio::write_json(textio::manifest_path(path), ds.manifest.to_json());
}

Dataset load(const std::filesystem::path& path) {
  Dataset ds;
  ds.manifest = DatasetManifest::from_json(textio::read_json(textio::manifest_path(path)));
  const auto names = parameter_names(ds.manifest.model);
  const std::size_t width = 2 * static_cast<std::size_t>(ds.manifest.n_early);
  const std::size_t columns = 1 + names.size() + width + 1;

  std::vector<std::string> expected{"grid_index"};
  expected.insert(expected.end(), names.begin(), names.end());
  for (std::size_t c = 0; c < width; ++c) expected.push_back(feature_name(c));
  expected.emplace_back("target_c12");

  const std::string text = textio::read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path.string() + "' is empty");
  const auto header = textio::split_commas(line);
  if (header.size() != columns) {
    throw FormatError("header has " + std::to_string(header.size()) + " columns, expected " + std::to_string(columns));
  }
  for (std::size_t c = 0; c < columns; ++c) {
    if (header[c] != expected[c]) throw FormatError("unexpected column '" + std::string(header[c]) + "'");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = textio::split_commas(line);
    if (f.size() != columns) {
      throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                        " columns, expected " + std::to_string(columns));
    }
    DatasetRecord r;
    const long long idx = textio::parse_integer(f[0]);
    if (idx < 0) throw FormatError("negative grid index on line " + std::to_string(line_no));
    r.grid_index = static_cast<std::size_t>(idx);
    std::vector<double> params;
    for (std::size_t c = 0; c < names.size(); ++c) params.push_back(textio::parse_double(f[1 + c]));
    r.params = point_from_values(ds.manifest.model, params);
    r.features.reserve(width);
    for (std::size_t c = 0; c < width; ++c) r.features.push_back(textio::parse_double(f[1 + names.size() + c]));
    r.target = textio::parse_double(f[columns - 1]);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace qsync::sweep
