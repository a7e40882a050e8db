#pragma once

// Per-agent secondary frequency controller: delayed linear consensus on
// (omega, u^c) plus an integral sliding-mode term whose discontinuity only
// enters the derivative of the applied input omega_bar.

#include "mgsync/plant.hpp"
#include "mgsync/topology.hpp"

#include <span>
#include <vector>

namespace mgsync {

struct AgentState {
  double u_c = 0.0;        // linear consensus component [rad/s]
  double z = 0.0;          // ISM reference integrator [rad/s]
  double omega_bar = 0.0;  // applied SC input [rad/s]
  double u_d = 0.0;        // accumulated discontinuous component [rad/s]
  bool enabled = false;
};

/// Sliding variable S_i = omega_i - z_i.
inline double sliding_variable(const AgentState& a, double omega) { return omega - a.z; }

/// Neighbour lists and gains of every agent, flattened from a GainSet.
class ConsensusLaw {
 public:
  struct Link {
    int j;
    double gain;
  };

  ConsensusLaw(const CommTopology& topology, const GainSet& gains);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(pin_.size()); }
  [[nodiscard]] double pin_gain(int i) const { return pin_.at(i); }
  [[nodiscard]] const std::vector<Link>& omega_links(int i) const { return k_.at(i); }
  [[nodiscard]] const std::vector<Link>& uc_links(int i) const { return k_bar_.at(i); }

 private:
  std::vector<double> pin_;
  std::vector<std::vector<Link>> k_;
  std::vector<std::vector<Link>> k_bar_;
};

/// du^c_i/dt = -sum_{j in N_i ∪ {0}} k_ij (omega_i - omega_j) - sum_{j in N_i} kbar_ij (u^c_i - u^c_j),
/// all arguments already delayed; the leader contributes `leader_omega`.
double consensus_rate(int agent, std::span<const double> omega_delayed, std::span<const double> uc_delayed,
                      double leader_omega, const ConsensusLaw& law);

/// du^d_i/dt = -m SIGN(S). SIGN(0) selects 0. A positive boundary layer
/// replaces the relay by the saturation S / width.
double ism_rate(double sliding, double m, double boundary_layer = 0.0);

/// Switches the agent on: z <- omega, u^c <- omega_bar, u^d <- 0.
AgentState activate(const AgentState& agent, double omega);

/// One forward-Euler step. Disabled agents hold omega_bar and keep
/// u^c = omega_bar so that activation is continuous.
AgentState agent_step(const AgentState& agent, double omega, double uc_rate, double m, double h,
                      double boundary_layer = 0.0);

/// Reaching condition m_i > Pi, strict, per DG.
std::vector<bool> verify_gain_condition(std::span<const double> m, const DisturbanceBound& bound);

}  // namespace mgsync
