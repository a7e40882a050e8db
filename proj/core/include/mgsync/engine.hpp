#pragma once

// Fixed-step forward-Euler co-simulation of the plant and the secondary
// controllers over the delayed communication network.

#include "mgsync/comms.hpp"
#include "mgsync/controller.hpp"
#include "mgsync/plant.hpp"
#include "mgsync/scenario.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mgsync {

struct PlantOutputs {
  std::vector<PowerInjection> power;  // instantaneous injections
  std::vector<double> omega;
};

class Plant {
 public:
  virtual ~Plant() = default;
  [[nodiscard]] virtual int size() const = 0;
  /// Outputs at the current state for the given SC inputs.
  virtual void evaluate(double t, std::span<const double> omega_bar, PlantOutputs& out) const = 0;
  /// One Euler step from the current state with inputs held over [t, t+h).
  virtual void advance(double h, std::span<const double> omega_bar, std::span<const double> v_bar,
                       const PlantOutputs& out) = 0;
  [[nodiscard]] virtual std::span<const DgState> states() const = 0;
  /// nullptr when the plant has no loads.
  virtual LoadProfile* loads() { return nullptr; }
};

/// Droop DGs coupled by the nonlinear power flow.
class DroopMicrogrid final : public Plant {
 public:
  DroopMicrogrid(std::vector<DgParams> params, ElectricalGraph graph, LoadProfile loads,
                 std::vector<DgState> initial);

  /// Sets P_meas, Q_meas to the instantaneous powers at time t.
  void initialize_filters(double t);

  [[nodiscard]] int size() const override { return static_cast<int>(params_.size()); }
  void evaluate(double t, std::span<const double> omega_bar, PlantOutputs& out) const override;
  void advance(double h, std::span<const double> omega_bar, std::span<const double> v_bar,
               const PlantOutputs& out) override;
  [[nodiscard]] std::span<const DgState> states() const override { return states_; }
  LoadProfile* loads() override { return &loads_; }

 private:
  std::vector<DgParams> params_;
  ElectricalGraph graph_;
  LoadProfile loads_;
  std::vector<DgState> states_;
  mutable std::vector<PowerInjection> demand_;
};

/// omega_i = omega_bar_i + d_i with the disturbances d_i frozen: the
/// disturbance-free linear closed loop.
class FrozenDisturbancePlant final : public Plant {
 public:
  FrozenDisturbancePlant(std::vector<DgParams> params, std::vector<double> d0, std::vector<DgState> initial);

  [[nodiscard]] int size() const override { return static_cast<int>(d_.size()); }
  void evaluate(double t, std::span<const double> omega_bar, PlantOutputs& out) const override;
  void advance(double h, std::span<const double> omega_bar, std::span<const double> v_bar,
               const PlantOutputs& out) override;
  [[nodiscard]] std::span<const DgState> states() const override { return states_; }
  [[nodiscard]] const std::vector<double>& disturbance() const noexcept { return d_; }

 private:
  std::vector<DgParams> params_;
  std::vector<double> d_;
  std::vector<DgState> states_;
};

/// Builds the plant selected by the scenario with every load event at
/// t <= 0 applied and filters initialized. The frozen plant takes
/// d_i = -k_P,i P_meas,i from the droop model's initial state.
std::unique_ptr<Plant> make_plant(const Scenario& scenario, std::optional<PlantModel> model = std::nullopt);

struct Trajectory {
  int n_dg = 0;
  double step = 0.0;  // simulation step h
  int stride = 1;     // records every stride-th step
  std::vector<double> t;
  std::vector<double> tau;
  std::vector<double> omega0;  // leader reference (not written to CSV)
  Matrix delta, omega, v, p, q, u_c, z, s, omega_bar;  // rows = records, cols = DGs

  [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
  void resize(std::size_t records, int n);
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  std::optional<int> record_stride;
  std::optional<PlantModel> plant;
  std::optional<GainSet> gains;
};

/// Per step n (t_n = n h): apply events due at t_n, evaluate the plant,
/// push (omega, u^c) to the history, query every agent's inputs at
/// t_n - tau_n, record the pre-update state, then update all controller and
/// plant states from that frozen snapshot. Records steps 0..steps-1.
/// Throws Error{kConfig} without gains, Error{kNumerical} with the step
/// index and DG on a non-finite state.
Trajectory run(const Scenario& scenario, const RunOptions& options = {});

/// The delay trace run() uses for this scenario and options.
DelayTrace delay_trace_for(const Scenario& scenario, const RunOptions& options = {});

/// chi = (e, Omega u^c) per record, e = omega - omega0.
Matrix consensus_error(const Trajectory& trajectory);

}  // namespace mgsync
