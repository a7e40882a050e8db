#include "mgsync/controller.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>

namespace mgsync {

ConsensusLaw::ConsensusLaw(const CommTopology& topology, const GainSet& gains)
    : pin_(topology.size(), 0.0), k_(topology.size()), k_bar_(topology.size()) {
  validate_gains(topology, gains);
  for (const auto& [edge, value] : gains.k) {
    if (edge.second == kLeader) {
      pin_[edge.first] = value;
    } else {
      k_[edge.first].push_back({edge.second, value});
    }
  }
  for (const auto& [edge, value] : gains.k_bar) k_bar_[edge.first].push_back({edge.second, value});
}

double consensus_rate(int agent, std::span<const double> omega_delayed, std::span<const double> uc_delayed,
                      double leader_omega, const ConsensusLaw& law) {
  const double wi = omega_delayed[agent];
  const double ui = uc_delayed[agent];
  double rate = -law.pin_gain(agent) * (wi - leader_omega);
  for (const auto& l : law.omega_links(agent)) rate -= l.gain * (wi - omega_delayed[l.j]);
  for (const auto& l : law.uc_links(agent)) rate -= l.gain * (ui - uc_delayed[l.j]);
  return rate;
}

double ism_rate(double sliding, double m, double boundary_layer) {
  if (boundary_layer > 0.0) return -m * std::clamp(sliding / boundary_layer, -1.0, 1.0);
  if (sliding > 0.0) return -m;
  if (sliding < 0.0) return m;
  return 0.0;
}

AgentState activate(const AgentState& agent, double omega) {
  AgentState a = agent;
  a.enabled = true;
  a.z = omega;
  a.u_c = a.omega_bar;
  a.u_d = 0.0;
  return a;
}

AgentState agent_step(const AgentState& agent, double omega, double uc_rate, double m, double h,
                      double boundary_layer) {
  AgentState a = agent;
  if (!a.enabled) {
    a.u_c = a.omega_bar;
    return a;
  }
  const double ud_rate = ism_rate(sliding_variable(agent, omega), m, boundary_layer);
  a.z += h * uc_rate;
  a.u_c += h * uc_rate;
  a.u_d += h * ud_rate;
  a.omega_bar += h * (uc_rate + ud_rate);
  return a;
}

std::vector<bool> verify_gain_condition(std::span<const double> m, const DisturbanceBound& bound) {
  std::vector<bool> ok(m.size());
  std::transform(m.begin(), m.end(), ok.begin(), [&](double mi) { return mi > bound.pi; });
  return ok;
}

}  // namespace mgsync
