#pragma once

// Summary metrics over time windows of a trajectory.

#include "mgsync/engine.hpp"

#include <span>
#include <vector>

namespace mgsync {

/// t0 <= t < t1, or t0 <= t <= t1 when closed.
struct Window {
  double t0 = 0.0;
  double t1 = 0.0;
  bool closed = false;

  [[nodiscard]] bool contains(double t) const { return t >= t0 && (closed ? t <= t1 : t < t1); }
};

/// Per DG max |omega_i - reference| over the window.
std::vector<double> max_frequency_error(const Trajectory& tr, const Window& w, double reference);

/// Max over pairs and window samples of |P_i/P_j - kP_j/kP_i| / (kP_j/kP_i).
/// Samples with |P_j| below `threshold` are skipped.
double max_sharing_error(const Trajectory& tr, const Window& w, std::span<const DgParams> params,
                         double threshold = 1e-9);

/// Per DG max |S_i| over the window.
std::vector<double> max_abs_sliding(const Trajectory& tr, const Window& w);

/// Per DG first time after which omega_i stays within band * |omega_i(t0) - final|
/// of `final`, searching [w.t0, w.t1]. NaN if the band is never held.
std::vector<double> settling_time(const Trajectory& tr, const Window& w, double final, double band = 0.02);

/// Per DG max |d_i(k+1) - d_i(k)| / dt with d = omega - omega_bar over the window.
std::vector<double> max_disturbance_rate(const Trajectory& tr, const Window& w);

/// Sup norm of omega_a - omega_b over all samples and DGs (equal grids required).
double max_frequency_deviation(const Trajectory& a, const Trajectory& b);

}  // namespace mgsync
