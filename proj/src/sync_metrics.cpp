#include "qsync/sync_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsync::metrics {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: series lengths differ");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx / n > kMinVariance) || !(syy / n > kMinVariance)) {
    throw UndefinedCorrelation("pearson: constant series, correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double late_window_pearson(const Trajectory& traj, std::size_t window) {
  if (window < 2) throw std::invalid_argument("late_window_pearson: window must be >= 2");
  if (traj.size() < window || traj.sx2.size() != traj.sx1.size()) {
    throw std::invalid_argument("late_window_pearson: trajectory shorter than window");
  }
  const std::size_t start = traj.size() - window;
  return pearson(std::span(traj.sx1).subspan(start), std::span(traj.sx2).subspan(start));
}

EvalReport mae(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw std::invalid_argument("mae: length mismatch");
  if (y.empty()) throw std::invalid_argument("mae: empty series");
  EvalReport report;
  report.n = y.size();
  report.abs_errors.reserve(y.size());
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = std::abs(y[i] - y_hat[i]);
    report.abs_errors.push_back(e);
    total += e;
  }
  report.mae = total / static_cast<double>(y.size());
  return report;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Sync:
      return "sync";
    case Regime::Antisync:
      return "antisync";
    case Regime::Delayed:
      return "delayed";
    case Regime::None:
      return "none";
  }
  return "none";
}

Regime classify_regime(double c12) {
  if (c12 >= 0.95) return Regime::Sync;
  if (c12 <= -0.95) return Regime::Antisync;
  if (std::abs(c12) <= 0.2) return Regime::None;
  return Regime::Delayed;
}

bool stationarity_check(const Trajectory& traj, std::size_t window, double tol, double amplitude_floor) {
  if (window < 2 || traj.size() < 2 * window) {
    throw std::invalid_argument("stationarity_check: trajectory shorter than two windows");
  }
  const std::size_t last = traj.size() - window;
  const std::size_t prev = last - window;
  const auto s1 = std::span(traj.sx1);
  const auto s2 = std::span(traj.sx2);
  try {
    const double c_prev = pearson(s1.subspan(prev, window), s2.subspan(prev, window));
    const double c_last = pearson(s1.subspan(last, window), s2.subspan(last, window));
    return std::abs(c_last - c_prev) <= tol;
  } catch (const UndefinedCorrelation&) {
    const auto both = std::max({max_abs(s1.subspan(prev)), max_abs(s2.subspan(prev))});
    return both <= amplitude_floor;
  }
}

}  // namespace qsync::metrics
