#include "mgsync/plant.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgsync {

void validate(const DgParams& p) {
  if (!(p.k_p > 0 && p.k_q > 0 && p.k_v > 0 && p.tau_p > 0 && p.tau_q > 0)) {
    fail(ErrorCategory::kConfig, "DG parameters k_P, k_Q, k_v, tau_P, tau_Q must all be > 0");
  }
}

LoadProfile::LoadProfile(std::vector<std::vector<LoadComponent>> components)
    : components_(std::move(components)), connected_(components_.size(), true) {
  for (const auto& bus : components_) {
    for (const auto& c : bus) {
      if (!(c.p >= 0.0 && c.q >= 0.0)) fail(ErrorCategory::kConfig, "load magnitudes must be nonnegative");
    }
  }
}

void LoadProfile::set_connected(int bus, bool on) { connected_.at(bus) = on; }

void LoadProfile::add_ramp(const LoadRamp& ramp) {
  if (ramp.bus < 0 || ramp.bus >= size()) fail(ErrorCategory::kConfig, "load ramp on unknown bus");
  if (ramp.t_end < ramp.t_start) fail(ErrorCategory::kConfig, "load ramp ends before it starts");
  ramps_.push_back(ramp);
}

PowerInjection LoadProfile::demand(int bus, double t) const {
  PowerInjection d;
  if (connected_.at(bus)) {
    for (const auto& c : components_[bus]) {
      d.p += c.p;
      d.q += c.q;
    }
  }
  for (const auto& r : ramps_) {
    if (r.bus != bus) continue;
    const double span = std::clamp(t - r.t_start, 0.0, r.t_end - r.t_start);
    d.p += r.p_rate * span;
    d.q += r.q_rate * span;
  }
  return d;
}

std::vector<PowerInjection> LoadProfile::demands(double t) const {
  std::vector<PowerInjection> out(components_.size());
  for (int i = 0; i < size(); ++i) out[i] = demand(i, t);
  return out;
}

std::vector<PowerInjection> power_flow(std::span<const DgState> states, const ElectricalGraph& graph,
                                       std::span<const PowerInjection> loads) {
  const int n = graph.size();
  if (static_cast<int>(states.size()) != n || static_cast<int>(loads.size()) != n) {
    fail(ErrorCategory::kDimension, "power_flow: states, loads and graph sizes differ");
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(states[i].delta) || !std::isfinite(states[i].v)) {
      fail(ErrorCategory::kNumerical, "power_flow: non-finite state at DG " + std::to_string(i + 1));
    }
  }
  std::vector<PowerInjection> out(loads.begin(), loads.end());
  for (const Line& l : graph.lines()) {
    const int i = l.from;
    const int j = l.to;
    const double vi = states[i].v;
    const double vj = states[j].v;
    const double dij = states[i].delta - states[j].delta;
    const double c = std::cos(dij);
    const double s = std::sin(dij);
    // Terms seen from i, then from j (d_ji = -d_ij).
    out[i].p += l.conductance * vi * (vi - vj * c) + l.susceptance * vi * vj * s;
    out[i].q += l.susceptance * vi * (vi - vj * c) - l.conductance * vi * vj * s;
    out[j].p += l.conductance * vj * (vj - vi * c) - l.susceptance * vi * vj * s;
    out[j].q += l.susceptance * vj * (vj - vi * c) + l.conductance * vi * vj * s;
  }
  return out;
}

DgState plant_derivatives(const DgState& s, const DgParams& p, double omega_bar, double v_bar,
                          const PowerInjection& injection) {
  DgState d;
  d.delta = output_frequency(s, p, omega_bar);
  d.v = (-s.v + v_bar - p.k_q * s.q_meas) / p.k_v;
  d.p_meas = (injection.p - s.p_meas) / p.tau_p;
  d.q_meas = (injection.q - s.q_meas) / p.tau_q;
  return d;
}

double droop_steady_state(std::span<const DgParams> params, double total_power, double omega0) {
  double inv_sum = 0.0;
  for (const auto& p : params) {
    if (!(p.k_p > 0)) fail(ErrorCategory::kConfig, "droop_steady_state: k_P must be > 0");
    inv_sum += 1.0 / p.k_p;
  }
  return omega0 - total_power / inv_sum;
}

std::vector<SharingRatio> sharing_ratio(std::span<const double> powers, std::span<const DgParams> params,
                                        double threshold) {
  if (powers.size() != params.size()) fail(ErrorCategory::kDimension, "sharing_ratio: size mismatch");
  std::vector<SharingRatio> out;
  const int n = static_cast<int>(powers.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      SharingRatio r{i, j, std::nullopt};
      const double den = params[j].k_p * powers[j];
      if (std::abs(den) > threshold) r.value = params[i].k_p * powers[i] / den;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<double> disturbance_rate(const Matrix& d_series, double h) {
  if (!(h > 0)) fail(ErrorCategory::kConfig, "disturbance_rate: step must be > 0");
  std::vector<double> out(d_series.cols(), 0.0);
  for (Eigen::Index k = 0; k + 1 < d_series.rows(); ++k) {
    for (Eigen::Index i = 0; i < d_series.cols(); ++i) {
      out[i] = std::max(out[i], std::abs(d_series(k + 1, i) - d_series(k, i)) / h);
    }
  }
  return out;
}

}  // namespace mgsync
