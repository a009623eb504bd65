// qsync command-line front end: sweeps, train/evaluate, robustness scans and
// trajectory export. Every command writes run.json next to its outputs.
//
// Exit codes: 0 success, 1 usage error, 2 simulation or validation failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsync/config.hpp"
#include "qsync/experiments.hpp"
#include "qsync/parallel.hpp"
#include "qsync/sweep.hpp"
#include "qsync/textio.hpp"

namespace fs = std::filesystem;
using namespace qsync;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string model_tag;
  std::string model_positional;
  std::uint64_t seed = 0;
  int subsample = 1;
  int k = knn::kDefaultK;
  std::string out;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<double> eps_max;

  // resolved
  Model model = Model::Lcm;
  config::Defaults defaults;
};

void add_model(CLI::App* cmd, Common& c) {
  cmd->add_option("MODEL", c.model_positional, "lcm, gcm or me");
  cmd->add_option("--model", c.model_tag, "lcm, gcm or me");
}

void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "defaults file replacing the built-in one")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override one config key, e.g. me.g=0.01 (repeatable)");
}

void add_grid(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--subsample", c.subsample, "keep every N-th index per grid axis")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", c.eps_max, "perturbation half-width for test grids");
}

void resolve(Common& c, bool need_model = true) {
  if (!c.model_tag.empty() && !c.model_positional.empty() && c.model_tag != c.model_positional) {
    throw UsageError("model given twice with different values");
  }
  const std::string tag = c.model_tag.empty() ? c.model_positional : c.model_tag;
  if (need_model) {
    if (tag.empty()) throw UsageError("a model (lcm, gcm or me) is required");
    try {
      c.model = parse_model(tag);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  nlohmann::json tree = c.config_path.empty() ? nlohmann::json::parse(config::embedded_defaults_text())
                                              : textio::read_json(c.config_path);
  for (const auto& o : c.overrides) {
    try {
      config::apply_override(tree, o);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  try {
    c.defaults = config::from_json(tree);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  if (!c.eps_max) c.eps_max = c.defaults.eps_max;
  if (*c.eps_max < 0.0) throw UsageError("--eps must be non-negative");
}

fs::path out_dir(const Common& c, const std::string& fallback) {
  fs::path dir = c.out.empty() ? fs::path("out") / fallback : fs::path(c.out);
  fs::create_directories(dir);
  return dir;
}

experiments::Protocol protocol(const Common& c) {
  experiments::Protocol p;
  p.model = c.model;
  p.base = c.defaults.base;
  p.subsample = c.subsample;
  p.eps_max = *c.eps_max;
  p.seed = c.seed;
  p.k = c.k;
  return p;
}

void check_n_early(const Common& c, int n) {
  const std::size_t len = sweep::run_length(c.defaults.base, c.model);
  if (n < 1 || static_cast<std::size_t>(n) > len) {
    throw UsageError("--n-early " + std::to_string(n) + " outside [1, " + std::to_string(len) + "]");
  }
}

class RunRecord {
 public:
  RunRecord(int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
  }

  void output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write(const fs::path& dir, const std::string& command, const Common& c, nlohmann::json seeds) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json j;
    j["command"] = command;
    j["command_line"] = argv_;
    j["config_digest"] = config::digest_hex(c.defaults.source);
    j["config_source"] = c.config_path.empty() ? "built-in" : c.config_path;
    j["config_overrides"] = c.overrides;
    j["seeds"] = std::move(seeds);
    j["outputs"] = outputs_;
    j["wall_clock_seconds"] = elapsed;
    j["workers"] = worker_count();
    j["version"] = QSYNC_VERSION;
    textio::write_json(dir / "run.json", j);
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> argv_;
  std::vector<std::string> outputs_;
};

std::string param_header(Model m) {
  std::string h;
  for (const auto& n : sweep::parameter_names(m)) h += n + ",";
  return h;
}

std::string param_cells(Model m, const sweep::GridPoint& p) {
  std::string s;
  for (double v : sweep::parameter_values(m, p)) s += textio::format_double(v) + ",";
  return s;
}

// ---------------------------------------------------------------------------

int cmd_sweep(Common& c, int n_early, bool perturbed, RunRecord& run) {
  resolve(c);
  check_n_early(c, n_early);
  const auto p = protocol(c);
  const auto grid = perturbed ? experiments::test_grid(p) : experiments::training_grid(p);
  const auto ds = sweep::build_dataset(c.model, grid, n_early, c.defaults.base, c.seed);

  const fs::path dir = out_dir(c, "sweep-" + std::string(to_string(c.model)));
  const fs::path data = dir / "dataset.csv";
  sweep::save(ds, data);
  run.output(data);
  run.output(textio::manifest_path(data));

  std::ostringstream map;
  map << param_header(c.model) << "c12\n";
  for (const auto& r : ds.records) map << param_cells(c.model, r.params) << textio::format_double(r.target) << '\n';
  textio::write_text(dir / "c12_map.csv", map.str());
  run.output(dir / "c12_map.csv");

  if (!ds.manifest.undefined_targets.empty()) {
    std::cerr << ds.manifest.undefined_targets.size() << " grid points had a constant late window (target 0)\n";
  }
  nlohmann::json seeds{{"seed", c.seed}};
  if (perturbed) seeds["perturb_seed"] = grid.perturbation->seed;
  run.write(dir, "sweep", c, seeds);
  std::cout << "wrote " << ds.records.size() << " records to " << data.string() << '\n';
  return 0;
}

int cmd_train_eval(Common& c, const std::string& train_path, const std::string& test_path, RunRecord& run) {
  resolve(c, false);
  const auto train = sweep::load(train_path);
  const auto test = sweep::load(test_path);
  const auto eval = experiments::fit_and_evaluate(train, test, c.k);
  const Model m = test.manifest.model;

  const fs::path dir = out_dir(c, "train-eval");
  std::ostringstream csv;
  csv << "grid_index," << param_header(m) << "target_c12,predicted_c12,abs_error\n";
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    const auto& r = test.records[i];
    csv << r.grid_index << ',' << param_cells(m, r.params) << textio::format_double(r.target) << ','
        << textio::format_double(eval.predictions[i]) << ',' << textio::format_double(eval.report.abs_errors[i])
        << '\n';
  }
  textio::write_text(dir / "predictions.csv", csv.str());
  run.output(dir / "predictions.csv");

  nlohmann::json report{{"model", std::string(to_string(m))},
                        {"k", c.k},
                        {"n_early", test.manifest.n_early},
                        {"n_train", train.records.size()},
                        {"n_test", eval.report.n},
                        {"mae", eval.report.mae},
                        {"train", train_path},
                        {"test", test_path}};
  textio::write_json(dir / "report.json", report);
  run.output(dir / "report.json");
  run.write(dir, "train-eval", c, {{"train_seed", train.manifest.seed}, {"test_seed", test.manifest.seed}});
  std::cout << "MAE " << textio::format_double(eval.report.mae) << " over " << eval.report.n << " test points\n";
  return 0;
}

int cmd_noise_scan(Common& c, std::vector<int> n_list, std::vector<double> rates, int repeats, RunRecord& run) {
  resolve(c);
  if (n_list.empty()) n_list = c.defaults.scans.n_early;
  if (rates.empty()) rates = c.defaults.scans.rates;
  for (int n : n_list) check_n_early(c, n);
  for (double r : rates)
    if (r < 0.0) throw UsageError("noise rates must be non-negative");
  if (repeats < 1) throw UsageError("--repeats must be >= 1");

  const auto rows = experiments::noise_scan(protocol(c), n_list, rates, repeats);
  const fs::path dir = out_dir(c, "noise-scan-" + std::string(to_string(c.model)));
  std::ostringstream csv;
  csv << "n_early,rate,mae,mae_std,repeats\n";
  for (const auto& r : rows) {
    csv << r.n_early << ',' << textio::format_double(r.rate) << ',' << textio::format_double(r.mae) << ','
        << textio::format_double(r.mae_std) << ',' << r.repeats << '\n';
  }
  textio::write_text(dir / "noise_scan.csv", csv.str());
  run.output(dir / "noise_scan.csv");
  run.write(dir, "noise-scan", c,
            {{"seed", c.seed},
             {"perturb_seed", sweep::derive_seed(c.seed, experiments::kPerturbStream)},
             {"noise_seed", sweep::derive_seed(c.seed, experiments::kNoiseStream)}});
  std::cout << csv.str();
  return 0;
}

int cmd_scan(Common& c, const std::string& kind, std::vector<double> values, int n_early, RunRecord& run) {
  resolve(c);
  check_n_early(c, n_early);
  const bool init = kind == "init-error-scan";
  if (values.empty()) values = init ? c.defaults.scans.init_error : c.defaults.scans.temperature;

  std::vector<experiments::ScanRow> rows;
  try {
    rows = init ? experiments::init_error_scan(protocol(c), values, n_early)
                : experiments::temp_scan(protocol(c), values, n_early);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string column = init ? "one_minus_p" : (c.model == Model::Me ? "n_bar" : "env_p");
  const std::string file = init ? "init_error_scan.csv" : "temp_scan.csv";
  const fs::path dir = out_dir(c, kind + "-" + std::string(to_string(c.model)));
  std::ostringstream csv;
  csv << column << ",mae\n";
  for (const auto& r : rows) csv << textio::format_double(r.value) << ',' << textio::format_double(r.mae) << '\n';
  textio::write_text(dir / file, csv.str());
  run.output(dir / file);
  run.write(dir, kind, c,
            {{"seed", c.seed}, {"perturb_seed", sweep::derive_seed(c.seed, experiments::kPerturbStream)}});
  std::cout << csv.str();
  return 0;
}

struct ExportArgs {
  std::optional<double> omega_ratio;
  std::optional<double> lam;
  std::optional<double> j;
  std::optional<double> f12;
  std::optional<int> n_steps;
};

int cmd_export_traj(Common& c, const ExportArgs& a, RunRecord& run) {
  resolve(c);
  sweep::GridPoint pt = c.defaults.export_point(c.model);
  if (a.omega_ratio) pt.omega_ratio = *a.omega_ratio;
  if (a.lam) pt.lam = *a.lam;
  if (a.j) pt.j = *a.j;
  if (a.f12) pt.f12 = *a.f12;
  sweep::SimulationBase base = c.defaults.base;
  if (a.n_steps) {
    if (*a.n_steps < 1) throw UsageError("--n-steps must be >= 1");
    if (c.model == Model::Lcm) base.lcm.n_collisions = *a.n_steps;
    if (c.model == Model::Gcm) base.gcm.n_collisions = *a.n_steps;
    if (c.model == Model::Me) base.me.t_max = *a.n_steps * base.me.sample_dt;
  }

  Trajectory traj = sweep::simulate_point(base, c.model, pt);
  if (c.model != Model::Me) {
    // collision runs record after each cycle; prepend the prepared state
    const auto rho0 = sweep::initial_state_for(c.model, base.init);
    const auto sx = qdyn::pauli(qdyn::Axis::X);
    const auto id = qdyn::identity(2);
    traj.index.insert(traj.index.begin(), 0.0);
    traj.sx1.insert(traj.sx1.begin(), qdyn::expect(rho0, qdyn::kron(sx, id)));
    traj.sx2.insert(traj.sx2.begin(), qdyn::expect(rho0, qdyn::kron(id, sx)));
  }
  validate(traj);

  const fs::path dir = out_dir(c, "traj-" + std::string(to_string(c.model)));
  std::ostringstream csv;
  csv << (c.model == Model::Me ? "t" : "collision") << ",sx1,sx2\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    csv << textio::format_double(traj.index[i]) << ',' << textio::format_double(traj.sx1[i]) << ','
        << textio::format_double(traj.sx2[i]) << '\n';
  }
  textio::write_text(dir / "trajectory.csv", csv.str());
  run.output(dir / "trajectory.csv");
  nlohmann::json point;
  const auto names = sweep::parameter_names(c.model);
  const auto values = sweep::parameter_values(c.model, pt);
  for (std::size_t i = 0; i < names.size(); ++i) point[names[i]] = values[i];
  textio::write_json(dir / "point.json", point);
  run.output(dir / "point.json");
  run.write(dir, "export-traj", c, nlohmann::json::object());
  std::cout << "wrote " << traj.size() << " samples to " << (dir / "trajectory.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit open-system synchronization sweeps and KNN prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QSYNC_VERSION);

  Common c;
  int n_early = 100;
  bool perturbed = false;
  std::string train_path;
  std::string test_path;
  std::vector<int> n_list;
  std::vector<double> values;
  int repeats = 1;
  ExportArgs ex;

  auto* sweep_cmd = app.add_subcommand("sweep", "simulate a parameter grid and write a dataset");
  add_model(sweep_cmd, c);
  add_config(sweep_cmd, c);
  add_grid(sweep_cmd, c);
  sweep_cmd->add_option("--n-early", n_early, "early sample pairs per record");
  sweep_cmd->add_flag("--perturb", perturbed, "apply the seeded epsilon shift (test set)");
  sweep_cmd->add_option("--out", c.out, "output directory");

  auto* te_cmd = app.add_subcommand("train-eval", "fit KNN on one dataset and score another");
  te_cmd->add_option("--train", train_path, "training dataset")->required()->check(CLI::ExistingFile);
  te_cmd->add_option("--test", test_path, "test dataset")->required()->check(CLI::ExistingFile);
  te_cmd->add_option("--k", c.k, "neighbor count")->check(CLI::PositiveNumber);
  te_cmd->add_option("--out", c.out, "output directory");
  add_config(te_cmd, c);

  auto* noise_cmd = app.add_subcommand("noise-scan", "MAE against additive feature noise");
  add_model(noise_cmd, c);
  add_config(noise_cmd, c);
  add_grid(noise_cmd, c);
  noise_cmd->add_option("--n-early", n_list, "comma-separated list")->delimiter(',');
  noise_cmd->add_option("--rates", values, "comma-separated noise rates")->delimiter(',');
  noise_cmd->add_option("--repeats", repeats, "noise realizations averaged per rate");
  noise_cmd->add_option("--k", c.k, "neighbor count")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--out", c.out, "output directory");

  auto* init_cmd = app.add_subcommand("init-error-scan", "MAE against initialization error 1 - p");
  auto* temp_cmd = app.add_subcommand("temp-scan", "MAE against environment temperature");
  for (auto* cmd : {init_cmd, temp_cmd}) {
    add_model(cmd, c);
    add_config(cmd, c);
    add_grid(cmd, c);
    cmd->add_option("--values", values, "comma-separated scan values")->delimiter(',');
    cmd->add_option("--n-early", n_early, "early sample pairs per record");
    cmd->add_option("--k", c.k, "neighbor count")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output directory");
  }

  auto* traj_cmd = app.add_subcommand("export-traj", "write the full trajectory of one configuration");
  add_model(traj_cmd, c);
  add_config(traj_cmd, c);
  traj_cmd->add_option("--omega-ratio", ex.omega_ratio, "omega1 / omega2");
  traj_cmd->add_option("--lambda", ex.lam, "qubit-qubit coupling (collision models)");
  traj_cmd->add_option("--j", ex.j, "system-environment coupling (local model)");
  traj_cmd->add_option("--f12", ex.f12, "coherent dipole coupling (master equation)");
  traj_cmd->add_option("--n-steps", ex.n_steps, "collisions or samples to run");
  traj_cmd->add_option("--out", c.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  RunRecord run(argc, argv);
  try {
    if (sweep_cmd->parsed()) return cmd_sweep(c, n_early, perturbed, run);
    if (te_cmd->parsed()) return cmd_train_eval(c, train_path, test_path, run);
    if (noise_cmd->parsed()) return cmd_noise_scan(c, n_list, values, repeats, run);
    if (init_cmd->parsed()) return cmd_scan(c, "init-error-scan", values, n_early, run);
    if (temp_cmd->parsed()) return cmd_scan(c, "temp-scan", values, n_early, run);
    if (traj_cmd->parsed()) return cmd_export_traj(c, ex, run);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
