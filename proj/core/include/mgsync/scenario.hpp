#pragma once

// Scenario description: microgrid, cyber layer, controller settings and the
// event schedule. Stored on disk as JSON (comments allowed) with explicit
// units in field names; see scenarios/scenario.schema.json.

#include "mgsync/comms.hpp"
#include "mgsync/lmi.hpp"
#include "mgsync/plant.hpp"
#include "mgsync/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mgsync {

enum class EventKind { kActivateFreqSc, kSetOmega0, kConnectLoad, kSetVbar, kRampLoad };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kActivateFreqSc;
  std::vector<int> dgs;  // activate_freq_sc: empty means all
  int bus = -1;          // connect_load / ramp_load; set_vbar: -1 means all
  bool on = true;        // connect_load
  double value = 0.0;    // set_omega0 [rad/s], set_vbar [V]
  double p_rate = 0.0;   // ramp_load [W/s]
  double q_rate = 0.0;   // ramp_load [VAR/s]
  double t_end = 0.0;    // ramp_load
};

enum class PlantModel {
  kDroop,               // nonlinear droop DGs over the power-flow network
  kFrozenDisturbance,   // omega = omega_bar + d0, d0 fixed at t = 0
};

enum class FilterInit { kZero, kInstantaneous };

struct Scenario {
  std::string name;
  double duration = 0.0;  // [s]
  double step = 5e-5;     // [s]
  int record_stride = 1;

  double omega_nominal = 0.0;  // held omega_bar while SC is off [rad/s]
  double v_nominal = 0.0;      // [V]
  double omega0 = 0.0;         // initial leader reference [rad/s]

  std::vector<DgParams> dg;
  std::vector<std::vector<LoadComponent>> loads;
  std::vector<Line> lines;

  std::vector<std::pair<int, int>> comm_edges;
  std::set<int> leader_pins;
  std::optional<GainSet> gains;  // empty: synthesize before running
  std::vector<double> m;
  double boundary_layer = 0.0;
  bool leader_delayed = false;

  DelayBounds delay;
  double tau_g_synthesis = 0.999;
  std::optional<double> tau_initial;
  std::uint64_t seed = 1;
  double pi = 0.05;

  SynthesisOptions synthesis;

  PlantModel plant = PlantModel::kDroop;
  FilterInit filters = FilterInit::kInstantaneous;
  std::vector<double> delta0;  // [rad], empty means zeros
  std::vector<double> v0;      // [V], empty means v_nominal

  std::vector<Event> events;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(dg.size()); }
  [[nodiscard]] ElectricalGraph electrical_graph() const { return {size(), lines}; }
  [[nodiscard]] CommTopology comm_topology() const { return {size(), comm_edges, leader_pins}; }
  [[nodiscard]] std::size_t steps() const;
};

/// Throws Error{kConfig} with the offending field on any schema or
/// consistency violation (unordered events, event after the end, ...).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Structural checks shared by the parser and programmatic construction.
void validate(const Scenario& s);

}  // namespace mgsync
