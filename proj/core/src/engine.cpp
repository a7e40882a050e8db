#include "mgsync/engine.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgsync {

DroopMicrogrid::DroopMicrogrid(std::vector<DgParams> params, ElectricalGraph graph, LoadProfile loads,
                               std::vector<DgState> initial)
    : params_(std::move(params)), graph_(std::move(graph)), loads_(std::move(loads)), states_(std::move(initial)) {
  const auto n = static_cast<std::size_t>(graph_.size());
  if (params_.size() != n || states_.size() != n || static_cast<std::size_t>(loads_.size()) != n) {
    fail(ErrorCategory::kDimension, "DroopMicrogrid: parameter, state and load counts differ from the graph");
  }
  for (const auto& p : params_) validate(p);
}

void DroopMicrogrid::initialize_filters(double t) {
  demand_ = loads_.demands(t);
  const auto pq = power_flow(states_, graph_, demand_);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    states_[i].p_meas = pq[i].p;
    states_[i].q_meas = pq[i].q;
  }
}

void DroopMicrogrid::evaluate(double t, std::span<const double> omega_bar, PlantOutputs& out) const {
  demand_ = loads_.demands(t);
  out.power = power_flow(states_, graph_, demand_);
  out.omega.resize(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) out.omega[i] = output_frequency(states_[i], params_[i], omega_bar[i]);
}

void DroopMicrogrid::advance(double h, std::span<const double> omega_bar, std::span<const double> v_bar,
                             const PlantOutputs& out) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const DgState d = plant_derivatives(states_[i], params_[i], omega_bar[i], v_bar[i], out.power[i]);
    states_[i].delta += h * d.delta;
    states_[i].v += h * d.v;
    states_[i].p_meas += h * d.p_meas;
    states_[i].q_meas += h * d.q_meas;
  }
}

FrozenDisturbancePlant::FrozenDisturbancePlant(std::vector<DgParams> params, std::vector<double> d0,
                                               std::vector<DgState> initial)
    : params_(std::move(params)), d_(std::move(d0)), states_(std::move(initial)) {
  if (params_.size() != d_.size() || states_.size() != d_.size()) {
    fail(ErrorCategory::kDimension, "FrozenDisturbancePlant: size mismatch");
  }
  for (std::size_t i = 0; i < d_.size(); ++i) {
    states_[i].p_meas = -d_[i] / params_[i].k_p;
    states_[i].q_meas = 0.0;
  }
}

void FrozenDisturbancePlant::evaluate(double, std::span<const double> omega_bar, PlantOutputs& out) const {
  out.power.resize(d_.size());
  out.omega.resize(d_.size());
  for (std::size_t i = 0; i < d_.size(); ++i) {
    out.power[i] = {states_[i].p_meas, 0.0};
    out.omega[i] = omega_bar[i] + d_[i];
  }
}

void FrozenDisturbancePlant::advance(double h, std::span<const double> omega_bar, std::span<const double> v_bar,
                                     const PlantOutputs&) {
  for (std::size_t i = 0; i < d_.size(); ++i) {
    states_[i].delta += h * (omega_bar[i] + d_[i]);
    states_[i].v = v_bar[i];
  }
}

namespace {

void apply_load_event(const Event& e, LoadProfile& loads) {
  if (e.kind == EventKind::kConnectLoad) {
    loads.set_connected(e.bus, e.on);
  } else if (e.kind == EventKind::kRampLoad) {
    loads.add_ramp({e.bus, e.p_rate, e.q_rate, e.time, e.t_end});
  }
}

std::vector<DgState> initial_states(const Scenario& s) {
  std::vector<DgState> st(s.size());
  for (int i = 0; i < s.size(); ++i) {
    st[i].delta = s.delta0.empty() ? 0.0 : s.delta0[i];
    st[i].v = s.v0.empty() ? s.v_nominal : s.v0[i];
  }
  return st;
}

}  // namespace

std::unique_ptr<Plant> make_plant(const Scenario& s, std::optional<PlantModel> model) {
  LoadProfile loads(s.loads);
  for (const auto& e : s.events) {
    if (e.time <= 0.0) apply_load_event(e, loads);
  }
  auto droop = std::make_unique<DroopMicrogrid>(s.dg, s.electrical_graph(), std::move(loads), initial_states(s));
  if (s.filters == FilterInit::kInstantaneous) droop->initialize_filters(0.0);
  if (model.value_or(s.plant) == PlantModel::kDroop) return droop;

  std::vector<double> d0(s.size());
  for (int i = 0; i < s.size(); ++i) d0[i] = -s.dg[i].k_p * droop->states()[i].p_meas;
  auto st = initial_states(s);
  return std::make_unique<FrozenDisturbancePlant>(s.dg, std::move(d0), std::move(st));
}

void Trajectory::resize(std::size_t records, int n) {
  n_dg = n;
  t.assign(records, 0.0);
  tau.assign(records, 0.0);
  omega0.assign(records, 0.0);
  for (Matrix* m : {&delta, &omega, &v, &p, &q, &u_c, &z, &s, &omega_bar}) m->setZero(static_cast<Eigen::Index>(records), n);
}

DelayTrace delay_trace_for(const Scenario& s, const RunOptions& o) {
  const double h = o.step.value_or(s.step);
  return generate_delay_trace(s.delay, h, s.duration, o.seed.value_or(s.seed), s.tau_initial);
}

Trajectory run(const Scenario& scenario, const RunOptions& o) {
  const int n = scenario.size();
  const double h = o.step.value_or(scenario.step);
  if (!(h > 0)) fail(ErrorCategory::kConfig, "run: step must be positive");
  const int stride = o.record_stride.value_or(scenario.record_stride);
  if (stride < 1) fail(ErrorCategory::kConfig, "run: record stride must be >= 1");
  const GainSet* gains = o.gains ? &*o.gains : (scenario.gains ? &*scenario.gains : nullptr);
  if (gains == nullptr) fail(ErrorCategory::kConfig, "run: scenario has no gains; synthesize them first");

  const CommTopology topology = scenario.comm_topology();
  const ConsensusLaw law(topology, *gains);
  std::vector<double> m = gains->m.empty() ? scenario.m : gains->m;
  if (static_cast<int>(m.size()) != n) fail(ErrorCategory::kConfig, "run: one ISM gain per DG required");

  const auto steps = static_cast<std::size_t>(std::llround(scenario.duration / h));
  const DelayTrace trace = delay_trace_for(scenario, o);

  auto plant = make_plant(scenario, o.plant);
  LoadProfile* loads = plant->loads();

  std::vector<AgentState> agents(n);
  for (auto& a : agents) {
    a.omega_bar = scenario.omega_nominal;
    a.u_c = scenario.omega_nominal;
  }
  std::vector<double> v_bar(n, scenario.v_nominal);
  double omega0 = scenario.omega0;
  // Leader reference history for the delayed-pin option.
  std::vector<std::pair<double, double>> omega0_history{{-1e300, omega0}};

  Trajectory traj;
  traj.step = h;
  traj.stride = stride;
  traj.resize((steps + stride - 1) / stride, n);

  const double horizon = scenario.delay.tau_star + 2.0 * h;
  std::optional<HistoryBuffer> history;
  Eigen::VectorXd snapshot(2 * n);
  std::vector<double> omega_bar(n);
  std::vector<double> omega_d(n);
  std::vector<double> uc_d(n);
  PlantOutputs out;
  std::size_t next_event = 0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const double tau = trace.at(k);

    // Events due at this step. Load events at t <= 0 are already in the plant.
    std::vector<const Event*> activations;
    while (next_event < scenario.events.size() && scenario.events[next_event].time <= t + 1e-9 * h) {
      const Event& e = scenario.events[next_event++];
      switch (e.kind) {
        case EventKind::kConnectLoad:
        case EventKind::kRampLoad:
          if (loads != nullptr && e.time > 0.0) apply_load_event(e, *loads);
          break;
        case EventKind::kSetOmega0:
          omega0 = e.value;
          omega0_history.emplace_back(t, omega0);
          break;
        case EventKind::kSetVbar:
          if (e.bus < 0) {
            std::fill(v_bar.begin(), v_bar.end(), e.value);
          } else {
            v_bar[e.bus] = e.value;
          }
          break;
        case EventKind::kActivateFreqSc:
          activations.push_back(&e);
          break;
      }
    }

    for (int i = 0; i < n; ++i) omega_bar[i] = agents[i].omega_bar;
    plant->evaluate(t, omega_bar, out);

    for (const Event* e : activations) {
      for (int i = 0; i < n; ++i) {
        const bool listed = e->dgs.empty() || std::find(e->dgs.begin(), e->dgs.end(), i) != e->dgs.end();
        if (listed && !agents[i].enabled) agents[i] = activate(agents[i], out.omega[i]);
      }
    }

    for (int i = 0; i < n; ++i) {
      snapshot(i) = out.omega[i];
      snapshot(n + i) = agents[i].u_c;
    }
    if (!history) history.emplace(horizon, h, snapshot);
    history->push(t, snapshot);
    const Eigen::VectorXd& delayed = history->query(t - tau);
    for (int i = 0; i < n; ++i) {
      omega_d[i] = delayed(i);
      uc_d[i] = delayed(n + i);
    }
    double leader = omega0;
    if (scenario.leader_delayed) {
      const double tq = t - tau;
      for (const auto& [te, w] : omega0_history) {
        if (te <= tq) leader = w;
      }
    }

    if (k % stride == 0) {
      const std::size_t r = k / stride;
      traj.t[r] = t;
      traj.tau[r] = tau;
      traj.omega0[r] = omega0;
      const auto st = plant->states();
      for (int i = 0; i < n; ++i) {
        traj.delta(r, i) = st[i].delta;
        traj.omega(r, i) = out.omega[i];
        traj.v(r, i) = st[i].v;
        traj.p(r, i) = out.power[i].p;
        traj.q(r, i) = out.power[i].q;
        traj.u_c(r, i) = agents[i].u_c;
        traj.z(r, i) = agents[i].z;
        traj.s(r, i) = agents[i].enabled ? sliding_variable(agents[i], out.omega[i]) : 0.0;
        traj.omega_bar(r, i) = agents[i].omega_bar;
      }
    }

    for (int i = 0; i < n; ++i) {
      const double rate = agents[i].enabled ? consensus_rate(i, omega_d, uc_d, leader, law) : 0.0;
      agents[i] = agent_step(agents[i], out.omega[i], rate, m[i], h, scenario.boundary_layer);
    }
    plant->advance(h, omega_bar, v_bar, out);

    const auto st = plant->states();
    for (int i = 0; i < n; ++i) {
      const bool finite = std::isfinite(st[i].delta) && std::isfinite(st[i].v) && std::isfinite(st[i].p_meas) &&
                          std::isfinite(st[i].q_meas) && std::isfinite(agents[i].omega_bar) &&
                          std::isfinite(agents[i].z);
      if (!finite) {
        fail(ErrorCategory::kNumerical,
             "non-finite state at step " + std::to_string(k + 1) + " in DG " + std::to_string(i + 1));
      }
    }
  }
  return traj;
}

Matrix consensus_error(const Trajectory& tr) {
  const int n = tr.n_dg;
  const auto rows = static_cast<Eigen::Index>(tr.size());
  Matrix chi(rows, 2 * n);
  const Matrix omega_proj = disagreement_matrix(n);
  for (Eigen::Index r = 0; r < rows; ++r) {
    chi.row(r).head(n) = tr.omega.row(r).array() - tr.omega0[r];
    chi.row(r).tail(n) = (omega_proj * tr.u_c.row(r).transpose()).transpose();
  }
  return chi;
}

}  // namespace mgsync
