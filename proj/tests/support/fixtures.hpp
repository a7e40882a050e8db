#pragma once

#include "mgsync/scenario.hpp"

#include <filesystem>
#include <string>

namespace mgsync::testing {

inline std::filesystem::path scenario_dir() { return MGSYNC_SCENARIO_DIR; }

inline Scenario reference_scenario() { return load_scenario(scenario_dir() / "paper_sec6.scenario"); }

/// Two DGs, one line, SC on at t = 0.1 s. `extra` is spliced into the root
/// object, so later keys override earlier ones.
inline std::string two_dg_json(const std::string& extra = {}) {
  return R"({
  "name": "two_dg",
  "duration_s": 0.5,
  "step_s": 1e-3,
  "nominal": {"frequency_hz": 50, "voltage_v": 220},
  "dgs": [
    {"k_p_rad_s_per_w": 6e-5, "k_q_v_per_var": 4.2e-4, "k_v_s": 1e-2, "tau_p_s": 0.016, "tau_q_s": 0.016,
     "loads": [{"p_w": 1e4, "q_var": 1e4}]},
    {"k_p_rad_s_per_w": 3e-5, "k_q_v_per_var": 4.2e-4, "k_v_s": 1e-2, "tau_p_s": 0.016, "tau_q_s": 0.016,
     "loads": [{"p_w": 2e4, "q_var": 1e4}]}
  ],
  "lines": [{"from": 1, "to": 2, "b_s": 10}],
  "comm": {"edges": [[1, 2]], "leader_pins": [1]},
  "gains": {"k": [[1, 0, 1.0], [1, 2, 0.5], [2, 1, 0.5]], "k_bar": [[1, 2, 0.5], [2, 1, 0.5]]},
  "ism": {"m_rad_s2": 0.1, "pi_rad_s2": 0.05},
  "delay": {"tau_star_s": 0.05, "tau_g": 1, "seed": 3},
  "events": [{"t_s": 0.1, "kind": "activate_freq_sc"}])" +
         (extra.empty() ? std::string() : ",\n" + extra) + "\n}";
}

}  // namespace mgsync::testing
