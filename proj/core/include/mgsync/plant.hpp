#pragma once

// Droop-controlled DG dynamics, constant-power loads and the coupled
// AC power flow over the electrical graph.

#include "mgsync/topology.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mgsync {

struct DgParams {
  double k_p = 0.0;    // frequency droop [rad/s per W]
  double k_q = 0.0;    // voltage droop [V per VAR]
  double k_v = 0.0;    // voltage time constant [s]
  double tau_p = 0.0;  // active power filter [s]
  double tau_q = 0.0;  // reactive power filter [s]
};

/// Throws Error{kConfig} unless every parameter is strictly positive.
void validate(const DgParams& p);

struct DgState {
  double delta = 0.0;   // phase angle [rad]
  double v = 0.0;       // voltage magnitude [V_rms]
  double p_meas = 0.0;  // filtered active power [W]
  double q_meas = 0.0;  // filtered reactive power [VAR]
};

struct PowerInjection {
  double p = 0.0;
  double q = 0.0;
};

struct LoadComponent {
  double p = 0.0;  // [W]
  double q = 0.0;  // [VAR]
};

/// Linear ramp added to a bus demand between t_start and t_end.
struct LoadRamp {
  int bus = 0;
  double p_rate = 0.0;  // [W/s]
  double q_rate = 0.0;  // [VAR/s]
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Per-bus constant-power loads. Each bus carries a list of components that
/// are summed while the bus load is connected; ramps superimpose on top.
class LoadProfile {
 public:
  LoadProfile() = default;
  explicit LoadProfile(std::vector<std::vector<LoadComponent>> components);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(components_.size()); }
  void set_connected(int bus, bool on);
  [[nodiscard]] bool connected(int bus) const { return connected_.at(bus); }
  void add_ramp(const LoadRamp& ramp);

  /// Demand (P_i^L, Q_i^L) at time t.
  [[nodiscard]] PowerInjection demand(int bus, double t) const;
  [[nodiscard]] std::vector<PowerInjection> demands(double t) const;

 private:
  std::vector<std::vector<LoadComponent>> components_;
  std::vector<bool> connected_;
  std::vector<LoadRamp> ramps_;
};

struct DisturbanceBound {
  double pi = 0.0;              // bound on |d d_i/dt| [rad/s^2]
  std::vector<double> pi_p;     // |P_i| bounds [W], optional
  std::vector<double> pi_q;     // |Q_i| bounds [VAR], optional
};

/// P_i = P_i^L + sum_j [G v_i (v_i - v_j cos d_ij) + B v_i v_j sin d_ij]
/// Q_i = Q_i^L + sum_j [B v_i (v_i - v_j cos d_ij) - G v_i v_j sin d_ij]
/// Throws Error{kNumerical} on a non-finite state.
std::vector<PowerInjection> power_flow(std::span<const DgState> states, const ElectricalGraph& graph,
                                       std::span<const PowerInjection> loads);

/// Output frequency omega_i = omega_bar_i - k_P,i P_meas,i.
inline double output_frequency(const DgState& s, const DgParams& p, double omega_bar) {
  return omega_bar - p.k_p * s.p_meas;
}

/// Time derivative of one DG state given its secondary-control inputs and
/// the instantaneous power injection.
DgState plant_derivatives(const DgState& s, const DgParams& p, double omega_bar, double v_bar,
                          const PowerInjection& injection);

/// Common droop frequency omega_0 - sum P / sum (1/k_P).
double droop_steady_state(std::span<const DgParams> params, double total_power, double omega0);

struct SharingRatio {
  int i = 0;
  int j = 0;
  std::optional<double> value;  // empty when |k_P,j P_j| is below threshold
};

/// k_P,i P_i / (k_P,j P_j) for every pair i < j.
std::vector<SharingRatio> sharing_ratio(std::span<const double> powers, std::span<const DgParams> params,
                                        double threshold = 1e-9);

/// Per-DG max |d_i(k+1) - d_i(k)| / h over a column-per-DG series of
/// d_i = -k_P,i P_meas,i (equivalently omega_i - omega_bar_i).
std::vector<double> disturbance_rate(const Matrix& d_series, double h);

}  // namespace mgsync
