#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qsync/dynamics.hpp"

namespace qsync::metrics {

/// Series whose population variance is at or below this are treated as constant.
inline constexpr double kMinVariance = 1e-24;

/// Pearson correlation coefficient, clamped to [-1, 1].
/// Throws std::invalid_argument for unequal lengths or n < 2, and
/// UndefinedCorrelation when either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson over the final `window` samples of (sx1, sx2).
double late_window_pearson(const Trajectory& traj, std::size_t window = 100);

struct EvalReport {
  std::size_t n = 0;
  double mae = 0.0;
  std::vector<double> abs_errors;
};

/// Mean absolute error; throws std::invalid_argument on length mismatch or n = 0.
EvalReport mae(std::span<const double> y, std::span<const double> y_hat);

enum class Regime { Sync, Antisync, Delayed, None };

std::string_view to_string(Regime regime);

/// sync for c >= 0.95, antisync for c <= -0.95, none for |c| <= 0.2,
/// delayed otherwise.
Regime classify_regime(double c12);

/// True iff the Pearson coefficients of the last two windows differ by at
/// most `tol`. If either window is constant, the trajectory counts as
/// stationary only when both windows have decayed below `amplitude_floor`.
bool stationarity_check(const Trajectory& traj, std::size_t window = 100, double tol = 0.05,
                        double amplitude_floor = 1e-6);

}  // namespace qsync::metrics
