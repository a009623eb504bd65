// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Physical settings come from the embedded defaults.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bridge.hpp"
#include "qsync/collision.hpp"
#include "qsync/config.hpp"
#include "qsync/experiments.hpp"
#include "qsync/knn.hpp"
#include "qsync/lindblad.hpp"
#include "qsync/sweep.hpp"
#include "qsync/sync_metrics.hpp"
#include "qsync/textio.hpp"

using namespace qsync;
using namespace qsync::qdyn;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 0;
constexpr int kEarly = 100;

int g_failures = 0;

void report(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs a criterion body; an exception counts as a failure.
void criterion(int id, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, ok, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double sx(const DensityMatrix& rho, int site) { return expect(rho, embed(pauli(Axis::X), site, 2)); }

struct Physicality {
  double trace = 0.0;
  double herm = 0.0;
  double min_eig = 1.0;

  void add(const ComplexMatrix& rho) {
    trace = std::max(trace, std::abs(rho.trace() - 1.0));
    herm = std::max(herm, hermiticity_error(rho));
    min_eig = std::min(min_eig, min_eigenvalue(rho));
  }
  bool ok() const { return trace <= 1e-9 && herm <= 1e-9 && min_eig >= -1e-8; }
  std::string str() const { return fmt("trace %.1e herm %.1e min_eig %.1e", trace, herm, min_eig); }
};

// ---------------------------------------------------------------- 1
bool grid_sizes(std::string& d) {
  const auto l = sweep::lcm_grid().size();
  const auto g = sweep::gcm_grid().size();
  const auto m = sweep::me_grid().size();
  d = fmt("lcm %zu, gcm %zu, me %zu", l, g, m);
  return l == 10250 && g == 3876 && m == 5151;
}

// ---------------------------------------------------------------- 2
collision::CollisionConfig random_collision(Model model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  collision::CollisionConfig c;
  c.omega2 = 0.5 + u(rng);
  c.omega1 = c.omega2 * (0.9 + 0.2 * u(rng));
  c.env_p = 0.5 * u(rng);
  if (model == Model::Lcm) {
    c.j = 0.3 * u(rng);
    c.lam = 0.1 * u(rng);
    c.dt_s = c.dt_ss = c.dt_se = 0.5 + u(rng);
  } else {
    c.j = 2.0 * u(rng);
    c.lam = 0.05 * u(rng);
    c.dt_s = 0.05 + 0.3 * u(rng);
    c.dt_ss = 0.05 + 0.3 * u(rng);
    c.dt_se = 0.01 + 0.1 * u(rng);
  }
  return c;
}

lindblad::MeConfig random_me(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  lindblad::MeConfig c;
  c.omega2 = 1.0;
  c.omega1 = 1.0 + 0.1 * u(rng);
  c.f12 = 0.05 * u(rng);
  c.g = 0.01 + 0.3 * u(rng);
  c.a12 = u(rng);
  c.n_bar = 0.1 * u(rng);
  return c;
}

bool physics_suite(std::string& d) {
  constexpr int kConfigs = 1000;
  constexpr int kSteps = 200;
  std::mt19937_64 rng(2);
  std::ostringstream out;
  bool ok = true;
  double unitarity = 0.0;

  for (Model model : {Model::Lcm, Model::Gcm}) {
    Physicality phys;
    for (int i = 0; i < kConfigs; ++i) {
      const auto cfg = random_collision(model, rng);
      const auto u = model == Model::Lcm ? collision::lcm_cycle_unitary(cfg) : collision::gcm_cycle_unitary(cfg);
      unitarity = std::max(unitarity, unitarity_error(u.matrix()));
      const auto step = collision::cycle_map(model, cfg);
      auto v = dyn::vectorize(bridge::random_state(4, rng));
      for (int s = 0; s < kSteps; ++s) {
        v = step.apply(v);
        phys.add(dyn::unvectorize(v));
      }
    }
    out << to_string(model) << ": " << phys.str() << "; ";
    ok = ok && phys.ok();
  }

  Physicality phys;
  for (int i = 0; i < kConfigs; ++i) {
    const auto cfg = random_me(rng);
    const auto step = lindblad::propagator(lindblad::liouvillian(cfg), cfg.sample_dt);
    auto v = dyn::vectorize(bridge::random_state(4, rng));
    for (int s = 0; s < kSteps; ++s) {
      v = step.apply(v);
      phys.add(dyn::unvectorize(v));
    }
  }
  out << "me: " << phys.str() << "; ";
  ok = ok && phys.ok();

  for (int i = 0; i < kConfigs; ++i) {
    const int dim = 2 << (i % 3);
    const auto h = bridge::random_hermitian(dim, rng);
    const double t = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    unitarity = std::max(unitarity, unitarity_error(unitary_of(h, t).matrix()));
  }
  out << fmt("unitarity %.1e", unitarity);
  d = fmt("%d configs/model, %d steps each; ", kConfigs, kSteps) + out.str();
  return ok && unitarity <= 1e-12;
}

// ---------------------------------------------------------------- 3
bool oracle_equivalence(std::string& d) {
  double worst = 0.0;

  // XX+YY on |01>: cos(Jt)|01> - i sin(Jt)|10>
  const ComplexMatrix h = 0.5 * (kron(pauli(Axis::X), pauli(Axis::X)) + kron(pauli(Axis::Y), pauli(Axis::Y)));
  for (double jt : {0.1, 0.7, 1.3, std::numbers::pi / 2}) {
    ComplexVector psi = ComplexVector::Zero(4);
    psi(1) = 1.0;
    const ComplexVector out = unitary_of(h, jt).matrix() * psi;
    worst = std::max({worst, std::abs(out(1) - Complex(std::cos(jt))), std::abs(out(2) - Complex(0, -std::sin(jt))),
                      std::abs(out(0)), std::abs(out(3))});
  }

  // |00> keeps zero x coherence under either cycle
  std::mt19937_64 rng(3);
  ComplexVector zz = ComplexVector::Zero(4);
  zz(0) = 1.0;
  const auto ground = DensityMatrix::pure(zz);
  for (int i = 0; i < 20; ++i) {
    for (Model model : {Model::Lcm, Model::Gcm}) {
      auto cfg = random_collision(model, rng);
      cfg.env_p = 0.0;
      const auto out = model == Model::Lcm ? collision::lcm_cycle(ground, cfg) : collision::gcm_cycle(ground, cfg);
      worst = std::max({worst, std::abs(sx(out, 0)), std::abs(sx(out, 1))});
    }
  }

  // free rotation: <sx_1> = cos(omega1 dt_s)
  for (double w1 : {0.3, 1.0, 2.2}) {
    collision::CollisionConfig cfg;
    cfg.omega1 = w1;
    cfg.omega2 = 1.0;
    cfg.j = 0.0;
    cfg.lam = 0.0;
    cfg.dt_s = 0.7;
    const auto out = collision::lcm_cycle(collision::initial_state(1.0), cfg);
    worst = std::max(worst, std::abs(sx(out, 0) - std::cos(w1 * 0.7)));
  }

  // ME propagator against two half steps of a Taylor-series exponential
  double me_worst = 0.0;
  std::mt19937_64 me_rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = random_me(me_rng);
    const oracle::MeParams q{cfg.omega1, cfg.omega2, cfg.f12, cfg.g, cfg.a12, cfg.n_bar};
    const auto half = oracle::expm(oracle::C(0.5 * cfg.sample_dt) * oracle::superop(q));
    const auto step = half * half;
    const auto rho0 = bridge::random_state(4, me_rng);
    auto v = oracle::vec(bridge::to_oracle(rho0.matrix()));
    const auto traj = lindblad::propagate(rho0, cfg);
    for (std::size_t s = 1; s < traj.size(); ++s) {
      v = oracle::apply(step, v);
      const auto rho = oracle::unvec(v, 4);
      me_worst = std::max({me_worst, std::abs(oracle::sx_of(rho, 0) - traj.sx1[s]),
                           std::abs(oracle::sx_of(rho, 1) - traj.sx2[s])});
    }
  }
  d = fmt("collision examples max dev %.1e (tol 1e-10); ME half-step max dev %.1e over 20 configs (tol 1e-8)", worst,
          me_worst);
  return worst <= 1e-10 && me_worst <= 1e-8;
}

// ---------------------------------------------------------------- 4
sweep::Dataset subsampled(const config::Defaults& def, Model model) {
  return sweep::build_dataset(model, sweep::subsample(sweep::default_grid(model), 4), kEarly, def.base, kSeed);
}

bool sync_structure(const config::Defaults& def, std::string& d) {
  // LCM
  const auto lcm = subsampled(def, Model::Lcm);
  double res_max = 0.0;
  int high_left = 0, high_right = 0, same_sign_pairs = 0;
  std::map<std::pair<double, double>, std::vector<const sweep::DatasetRecord*>> slices;
  for (const auto& r : lcm.records) {
    if (std::abs(r.params.omega_ratio - 1.0) < 1e-12) res_max = std::max(res_max, std::abs(r.target));
    slices[{r.params.lam, r.params.j}].push_back(&r);
  }
  for (const auto& [key, rows] : slices) {
    for (const auto* a : rows) {
      if (std::abs(a->target) < 0.9) continue;
      if (a->params.omega_ratio < 1.0) ++high_left;
      if (a->params.omega_ratio > 1.0) ++high_right;
      for (const auto* b : rows) {
        if (std::abs(b->target) < 0.9) continue;
        if (a->params.omega_ratio < 1.0 && b->params.omega_ratio > 1.0 && (a->target > 0) == (b->target > 0)) {
          ++same_sign_pairs;
        }
      }
    }
  }
  const bool lcm_ok = res_max < 0.2 && same_sign_pairs == 0 && high_left > 0 && high_right > 0;

  // GCM
  const auto gcm = subsampled(def, Model::Gcm);
  const auto gt = gcm.targets();
  const double g_max = *std::max_element(gt.begin(), gt.end());
  const double g_min = *std::min_element(gt.begin(), gt.end());
  const auto g_above = std::count_if(gt.begin(), gt.end(), [](double c) { return c > 0.9; });
  const bool gcm_ok = g_max <= 0.9 && g_min <= -0.9;

  // ME
  const auto me = subsampled(def, Model::Me);
  const auto mt = me.targets();
  const double m_max = *std::max_element(mt.begin(), mt.end());
  const double m_min = *std::min_element(mt.begin(), mt.end());
  const bool me_ok = m_max <= 0.1 && m_min <= -0.98;

  d = fmt("LCM %s: resonance max|C| %.3f, high-|C| points left %d right %d, same-sign cross pairs %d; "
          "GCM %s: max C %.4f (%ld of %zu above 0.9), min C %.4f; ME %s (g=%.2f): max C %.4f, min C %.4f",
          lcm_ok ? "ok" : "FAIL", res_max, high_left, high_right, same_sign_pairs, gcm_ok ? "ok" : "FAIL", g_max,
          static_cast<long>(g_above), gt.size(), g_min, me_ok ? "ok" : "FAIL", def.base.me.g, m_max, m_min);
  return lcm_ok && gcm_ok && me_ok;
}

// ---------------------------------------------------------------- 5-7
experiments::Protocol protocol(const config::Defaults& def, Model model) {
  experiments::Protocol p;
  p.model = model;
  p.base = def.base;
  p.eps_max = def.eps_max;
  p.seed = kSeed;
  return p;
}

std::map<Model, experiments::TrainTest> g_full;

bool accuracy(const config::Defaults& def, std::string& d) {
  const std::map<Model, double> limit{{Model::Lcm, 0.05}, {Model::Gcm, 0.10}, {Model::Me, 0.02}};
  const std::map<Model, double> paper{{Model::Lcm, 0.009}, {Model::Gcm, 0.040}, {Model::Me, 0.002}};
  bool ok = true;
  std::ostringstream out;
  for (Model m : {Model::Lcm, Model::Gcm, Model::Me}) {
    g_full.emplace(m, experiments::train_test(protocol(def, m), kEarly));
    const auto& tt = g_full.at(m);
    const double mae = experiments::fit_and_evaluate(tt.train, tt.test, knn::kDefaultK).report.mae;
    ok = ok && mae <= limit.at(m);
    out << fmt("%s MAE %.4f (limit %.2f, reference %.3f); ", std::string(to_string(m)).c_str(), mae, limit.at(m),
               paper.at(m));
  }
  d = out.str();
  return ok;
}

bool noise_trend(const config::Defaults& def, std::string& d) {
  constexpr int kRepeats = 3;
  bool ok = true;
  std::ostringstream out;
  for (Model m : {Model::Lcm, Model::Gcm, Model::Me}) {
    const auto rows = experiments::noise_scan(protocol(def, m), g_full.at(m), {5, 100}, {0.005, 0.05}, kRepeats);
    std::map<std::pair<int, double>, double> mae;
    for (const auto& r : rows) mae[{r.n_early, r.rate}] = r.mae;
    const double short_noisy = mae.at({5, 0.05});
    const double long_noisy = mae.at({100, 0.05});
    const double long_quiet = mae.at({100, 0.005});
    const bool here = short_noisy > long_noisy && long_noisy - long_quiet < 0.05;
    ok = ok && here;
    out << fmt("%s: MAE(n=5,r=.05) %.4f vs MAE(n=100,r=.05) %.4f, MAE(n=100,r=.005) %.4f; ",
               std::string(to_string(m)).c_str(), short_noisy, long_noisy, long_quiet);
  }
  d = fmt("mean over %d noise draws; ", kRepeats) + out.str();
  return ok;
}

bool non_decreasing(const std::vector<experiments::ScanRow>& rows, double tol) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mae < rows[i - 1].mae - tol) return false;
  }
  return true;
}

std::string series(const std::vector<experiments::ScanRow>& rows) {
  std::string s;
  for (const auto& r : rows) s += fmt("%s%.4f", s.empty() ? "" : " ", r.mae);
  return s;
}

bool scans(const config::Defaults& def, std::string& d) {
  const auto init = experiments::init_error_scan(protocol(def, Model::Me), g_full.at(Model::Me).train,
                                                 def.scans.init_error);
  double init_max = 0.0;
  for (const auto& r : init) init_max = std::max(init_max, r.mae);
  const bool init_ok = init_max < 0.02;

  const auto lcm = experiments::temp_scan(protocol(def, Model::Lcm), g_full.at(Model::Lcm).train,
                                          {0.01, 0.02, 0.03, 0.04, 0.05});
  double lo = 1.0, hi = 0.0;
  for (const auto& r : lcm) {
    lo = std::min(lo, r.mae);
    hi = std::max(hi, r.mae);
  }
  const bool lcm_ok = hi - lo < 0.02;

  const auto gcm = experiments::temp_scan(protocol(def, Model::Gcm), g_full.at(Model::Gcm).train,
                                          def.scans.temperature);
  const auto me = experiments::temp_scan(protocol(def, Model::Me), g_full.at(Model::Me).train,
                                         def.scans.temperature);
  const bool gcm_ok = non_decreasing(gcm, 0.01);
  const bool me_ok = non_decreasing(me, 0.01);

  d = fmt("ME init-error MAE [%s] max %.4f (< 0.02) %s; LCM env_p 0.01..0.05 MAE [%s] spread %.4f (< 0.02) %s; "
          "GCM env_p MAE [%s] %s; ME n_bar MAE [%s] %s",
          series(init).c_str(), init_max, init_ok ? "ok" : "FAIL", series(lcm).c_str(), hi - lo,
          lcm_ok ? "ok" : "FAIL", series(gcm).c_str(), gcm_ok ? "non-decreasing" : "FAIL", series(me).c_str(),
          me_ok ? "non-decreasing" : "FAIL");
  return init_ok && lcm_ok && gcm_ok && me_ok;
}

// ---------------------------------------------------------------- 8
bool unit_properties(std::string& d) {
  using V = std::vector<double>;
  std::vector<std::string> failed;
  const auto need = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  const V x{1, 2, 3};
  need(metrics::pearson(x, V{1, 2, 3}) == 1.0, "pearson +1");
  need(metrics::pearson(x, V{-1, -2, -3}) == -1.0, "pearson -1");
  need(metrics::pearson(x, V{1, 3, 2}) == 0.5, "pearson 0.5");
  Trajectory t;
  for (int i = 0; i < 150; ++i) {
    t.index.push_back(i + 1);
    t.sx1.push_back(std::cos(0.3 * i));
    t.sx2.push_back(std::cos(0.3 * i));
  }
  need(metrics::late_window_pearson(t) == 1.0, "late window +1");
  for (std::size_t i = 0; i < t.sx1.size(); ++i) t.sx2[i] = -t.sx1[i];
  need(metrics::late_window_pearson(t) == -1.0, "late window -1");

  const V y{0.3, -0.2, 0.9}, z{0.1, 0.4, -0.9};
  need(metrics::mae(y, y).mae == 0.0, "mae zero");
  need(metrics::mae(V{0, 1}, V{1, 1}).mae == 0.5, "mae 0.5");
  need(metrics::mae(y, z).mae == metrics::mae(z, y).mae, "mae symmetry");
  need(metrics::classify_regime(0.99) == metrics::Regime::Sync, "regime sync");
  need(metrics::classify_regime(-0.5) == metrics::Regime::Delayed, "regime delayed");
  need(metrics::classify_regime(0.05) == metrics::Regime::None, "regime none");

  using Rows = std::vector<V>;
  const auto fit = [](const Rows& rows, V targets, int k) {
    return knn::KnnModel::fit(knn::FeatureMatrix::from_rows(rows), std::move(targets), k);
  };
  const auto one = fit({{0.3, -0.1}}, {0.42}, 1);
  need(one.predict(V{5, 5}) == 0.42 && one.predict(V{-1, 0}) == 0.42, "knn single point");
  bool threw = false;
  try {
    fit({{0}, {1}, {2}, {3}, {4}}, {0, 0, 0, 0, 0}, 6);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  need(threw, "knn rejects k > N");
  need(fit({{1, 0}, {0, 2}}, {1, -1}, 1).predict(V{0, 0}) == 1.0 &&
           fit({{3, 0}, {0, 2}}, {1, -1}, 1).predict(V{0, 0}) == -1.0,
       "knn unscaled features");
  need(fit({{0, 0}, {1, 1}, {2, 0}}, {0.1, 0.2, 0.3}, 1).predict(V{1, 1}) == 0.2, "knn training row");
  need(fit({{-1, 0}, {1, 0}, {5, 5}}, {0.2, 0.8, -1.0}, 2).predict(V{0, 0}) == 0.5, "knn equidistant mean");
  const Rows sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const V sy{0.1, -0.3, 0.7, 0.2};
  need(knn::evaluate(fit(sq, sy, 1), knn::FeatureMatrix::from_rows(sq), sy).report.mae == 0.0, "evaluate train=test");

  std::mt19937_64 rng(40);
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::uniform_int_distribution<int> d_dist(1, 10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = n_dist(rng);
    const int dim = d_dist(rng);
    const int k = std::uniform_int_distribution<int>(1, std::min(n, 7))(rng);
    Rows X(static_cast<std::size_t>(n), V(static_cast<std::size_t>(dim)));
    V targets(static_cast<std::size_t>(n));
    for (auto& row : X)
      for (auto& v : row) v = u(rng);
    for (auto& v : targets) v = u(rng);
    const auto model = fit(X, targets, k);
    for (int q = 0; q < 5; ++q) {
      V query(static_cast<std::size_t>(dim));
      for (auto& v : query) v = u(rng);
      if (model.predict(query) != oracle::knn_predict(X, targets, query, k)) ++mismatches;
    }
  }
  need(mismatches == 0, "knn oracle");

  std::string names;
  for (const auto& f : failed) names += " " + f;
  d = fmt("%zu example checks failed; knn vs brute force: %d mismatches over 200 instances x 5 queries", failed.size(),
          mismatches) +
      (names.empty() ? "" : ";" + names);
  return failed.empty();
}

// ---------------------------------------------------------------- 9
bool determinism(std::string& d) {
  const fs::path root = fs::temp_directory_path() / "qsync_acceptance_determinism";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + QSYNC_CLI + "\" sweep gcm --seed 42 --subsample 4 --out \"" +
                            (root / run).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      d = "CLI run failed";
      return false;
    }
  }
  bool ok = true;
  std::string files;
  for (const char* name : {"dataset.csv", "dataset.manifest.json", "c12_map.csv"}) {
    const bool same = textio::read_text(root / "a" / name) == textio::read_text(root / "b" / name);
    ok = ok && same;
    files += fmt("%s%s %s", files.empty() ? "" : ", ", name, same ? "identical" : "DIFFER");
  }
  fs::remove_all(root);
  d = "sweep gcm --seed 42 --subsample 4 twice: " + files;
  return ok;
}

}  // namespace

int main() {
  const auto def = config::embedded_defaults();
  criterion(1, grid_sizes);
  criterion(2, physics_suite);
  criterion(3, oracle_equivalence);
  criterion(4, [&](std::string& d) { return sync_structure(def, d); });
  criterion(5, [&](std::string& d) { return accuracy(def, d); });
  criterion(6, [&](std::string& d) { return noise_trend(def, d); });
  criterion(7, [&](std::string& d) { return scans(def, d); });
  criterion(8, unit_properties);
  criterion(9, determinism);
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
