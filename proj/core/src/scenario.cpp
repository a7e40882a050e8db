#include "mgsync/scenario.hpp"

#include "mgsync/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mgsync {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorCategory::kConfig, "scenario: " + field + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) bad(ctx + key, "missing");
  return j.at(key);
}

double num(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "not finite");
  return v;
}

double num_or(const json& j, const char* key, double fallback, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return num(j.at(key), ctx + key);
}

int index1(const json& j, int n, const std::string& field, bool allow_leader = false) {
  if (!j.is_number_integer()) bad(field, "expected an integer DG index");
  const int v = j.get<int>();
  if (allow_leader && v == 0) return kLeader;
  if (v < 1 || v > n) bad(field, "DG index " + std::to_string(v) + " out of range 1.." + std::to_string(n));
  return v - 1;
}

std::vector<double> per_dg(const json& j, int n, const std::string& field) {
  if (j.is_number()) return std::vector<double>(n, num(j, field));
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(field, "expected a number or " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

double frequency(const json& j, const std::string& ctx) {
  const bool hz = j.contains("frequency_hz");
  const bool rad = j.contains("omega_rad_s");
  if (hz == rad) bad(ctx, "give exactly one of frequency_hz, omega_rad_s");
  return hz ? 2.0 * std::numbers::pi * num(j.at("frequency_hz"), ctx + "frequency_hz")
            : num(j.at("omega_rad_s"), ctx + "omega_rad_s");
}

EdgeGains parse_edge_gains(const json& j, int n, const std::string& field, bool allow_leader) {
  if (!j.is_array()) bad(field, "expected a list of [i, j, value]");
  EdgeGains out;
  for (std::size_t e = 0; e < j.size(); ++e) {
    const std::string f = field + "[" + std::to_string(e) + "]";
    if (!j[e].is_array() || j[e].size() != 3) bad(f, "expected [i, j, value]");
    const int a = index1(j[e][0], n, f);
    const int b = index1(j[e][1], n, f, allow_leader);
    if (!out.emplace(std::make_pair(a, b), num(j[e][2], f)).second) bad(f, "duplicate gain");
  }
  return out;
}

Event parse_event(const json& j, int n, const std::string& f) {
  Event ev;
  ev.time = num(need(j, "t_s", f + "."), f + ".t_s");
  const std::string kind = need(j, "kind", f + ".").get<std::string>();
  if (kind == "activate_freq_sc") {
    ev.kind = EventKind::kActivateFreqSc;
    if (j.contains("dgs")) {
      for (const auto& d : j.at("dgs")) ev.dgs.push_back(index1(d, n, f + ".dgs"));
    }
  } else if (kind == "set_omega0") {
    ev.kind = EventKind::kSetOmega0;
    ev.value = frequency(j, f + ".");
  } else if (kind == "connect_load") {
    ev.kind = EventKind::kConnectLoad;
    ev.bus = index1(need(j, "bus", f + "."), n, f + ".bus");
    if (!need(j, "on", f + ".").is_boolean()) bad(f + ".on", "expected true or false");
    ev.on = j.at("on").get<bool>();
  } else if (kind == "set_vbar") {
    ev.kind = EventKind::kSetVbar;
    if (j.contains("bus")) ev.bus = index1(j.at("bus"), n, f + ".bus");
    ev.value = num(need(j, "voltage_v", f + "."), f + ".voltage_v");
    if (!(ev.value > 0)) bad(f + ".voltage_v", "must be positive");
  } else if (kind == "ramp_load") {
    ev.kind = EventKind::kRampLoad;
    ev.bus = index1(need(j, "bus", f + "."), n, f + ".bus");
    ev.p_rate = num_or(j, "p_w_per_s", 0.0, f + ".");
    ev.q_rate = num_or(j, "q_var_per_s", 0.0, f + ".");
    ev.t_end = num(need(j, "t_end_s", f + "."), f + ".t_end_s");
    if (!(ev.t_end >= ev.time)) bad(f + ".t_end_s", "ends before it starts");
  } else {
    bad(f + ".kind", "unknown event kind '" + kind + "'");
  }
  return ev;
}

LmiForm parse_form(const std::string& s, const std::string& f) {
  if (s == "printed") return LmiForm::kPrinted;
  if (s == "jensen") return LmiForm::kJensen;
  bad(f, "expected 'printed' or 'jensen'");
}

}  // namespace

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(duration / step)); }

void validate(const Scenario& s) {
  const int n = s.size();
  if (n < 1) bad("dgs", "at least one DG required");
  if (!(s.step > 0)) bad("step_s", "must be positive");
  if (!(s.duration > 0)) bad("duration_s", "must be positive");
  if (std::abs(static_cast<double>(s.steps()) * s.step - s.duration) > 1e-9 * s.duration) {
    bad("duration_s", "must be a whole number of steps");
  }
  if (s.record_stride < 1) bad("record_stride", "must be >= 1");
  for (const auto& p : s.dg) validate(p);
  if (static_cast<int>(s.loads.size()) != n) bad("dgs.loads", "one load list per DG");
  for (const auto& bus : s.loads) {
    for (const auto& c : bus) {
      if (c.p < 0 || c.q < 0) bad("dgs.loads", "load magnitudes must be nonnegative");
    }
  }
  (void)s.electrical_graph();
  const CommTopology top = s.comm_topology();
  if (s.gains) {
    validate_gains(top, *s.gains);
  }
  if (static_cast<int>(s.m.size()) != n) bad("ism.m_rad_s2", "one value per DG");
  for (double m : s.m) {
    if (!(m > 0)) bad("ism.m_rad_s2", "must be positive");
  }
  if (s.boundary_layer < 0) bad("ism.boundary_layer_rad_s", "must be nonnegative");
  if (s.delay.tau_star < 0 || s.delay.tau_g < 0) bad("delay", "bounds must be nonnegative");
  if (s.tau_initial && (*s.tau_initial < 0 || *s.tau_initial > s.delay.tau_star)) {
    bad("delay.tau_initial_s", "must lie in [0, tau_star_s]");
  }
  if (!(s.pi > 0)) bad("ism.pi_rad_s2", "must be positive");
  if (!(s.omega_nominal > 0) || !(s.omega0 > 0) || !(s.v_nominal > 0)) bad("nominal", "must be positive");
  if (!s.delta0.empty() && static_cast<int>(s.delta0.size()) != n) bad("plant.delta0_rad", "one value per DG");
  if (!s.v0.empty() && static_cast<int>(s.v0.size()) != n) bad("plant.v0_v", "one value per DG");
  double last = 0.0;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    const std::string f = "events[" + std::to_string(i) + "]";
    if (e.time < 0) bad(f, "negative time");
    if (e.time < last) bad(f, "events must be time-ordered");
    last = e.time;
    if (e.kind == EventKind::kSetOmega0 && !(e.value > 0)) bad(f, "omega0 must be positive");
  }
  if (last > s.duration) bad("duration_s", "shorter than the last event time");
}

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::kConfig, std::string("scenario: parse error: ") + e.what());
  }
  if (!j.is_object()) bad("<root>", "expected an object");

  Scenario s;
  try {
    s.name = j.value("name", std::string("unnamed"));
    s.duration = num(need(j, "duration_s", ""), "duration_s");
    s.step = num_or(j, "step_s", s.step, "");
    if (j.contains("record_stride")) s.record_stride = j.at("record_stride").get<int>();

    const json& nominal = need(j, "nominal", "");
    s.omega_nominal = frequency(nominal, "nominal.");
    s.v_nominal = num(need(nominal, "voltage_v", "nominal."), "nominal.voltage_v");
    s.omega0 = s.omega_nominal;
    if (j.contains("leader")) {
      const json& leader = j.at("leader");
      if (leader.contains("frequency_hz") || leader.contains("omega_rad_s")) s.omega0 = frequency(leader, "leader.");
      s.leader_delayed = leader.value("delayed", false);
    }

    const json& dgs = need(j, "dgs", "");
    if (!dgs.is_array() || dgs.empty()) bad("dgs", "expected a non-empty list");
    for (std::size_t i = 0; i < dgs.size(); ++i) {
      const std::string f = "dgs[" + std::to_string(i) + "].";
      const json& d = dgs[i];
      DgParams p;
      p.k_p = num(need(d, "k_p_rad_s_per_w", f), f + "k_p_rad_s_per_w");
      p.k_q = num(need(d, "k_q_v_per_var", f), f + "k_q_v_per_var");
      p.k_v = num(need(d, "k_v_s", f), f + "k_v_s");
      p.tau_p = num(need(d, "tau_p_s", f), f + "tau_p_s");
      p.tau_q = num(need(d, "tau_q_s", f), f + "tau_q_s");
      s.dg.push_back(p);
      std::vector<LoadComponent> bus;
      if (d.contains("loads")) {
        for (std::size_t c = 0; c < d.at("loads").size(); ++c) {
          const json& l = d.at("loads")[c];
          const std::string lf = f + "loads[" + std::to_string(c) + "].";
          bus.push_back({num_or(l, "p_w", 0.0, lf), num_or(l, "q_var", 0.0, lf)});
        }
      }
      s.loads.push_back(std::move(bus));
    }
    const int n = s.size();

    for (std::size_t i = 0; i < need(j, "lines", "").size(); ++i) {
      const json& l = j.at("lines")[i];
      const std::string f = "lines[" + std::to_string(i) + "].";
      s.lines.push_back({index1(need(l, "from", f), n, f + "from"), index1(need(l, "to", f), n, f + "to"),
                         num_or(l, "g_s", 0.0, f), num(need(l, "b_s", f), f + "b_s")});
    }

    const json& comm = need(j, "comm", "");
    for (std::size_t i = 0; i < need(comm, "edges", "comm.").size(); ++i) {
      const json& e = comm.at("edges")[i];
      const std::string f = "comm.edges[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2) bad(f, "expected [i, j]");
      s.comm_edges.emplace_back(index1(e[0], n, f), index1(e[1], n, f));
    }
    for (const auto& p : need(comm, "leader_pins", "comm.")) s.leader_pins.insert(index1(p, n, "comm.leader_pins"));

    const json& gains = need(j, "gains", "");
    if (gains.is_string()) {
      if (gains.get<std::string>() != "synthesize") bad("gains", "expected an object or \"synthesize\"");
    } else {
      GainSet g;
      g.k = parse_edge_gains(need(gains, "k", "gains."), n, "gains.k", true);
      g.k_bar = parse_edge_gains(need(gains, "k_bar", "gains."), n, "gains.k_bar", false);
      s.gains = std::move(g);
    }

    const json& ism = need(j, "ism", "");
    s.m = per_dg(need(ism, "m_rad_s2", "ism."), n, "ism.m_rad_s2");
    s.pi = num(need(ism, "pi_rad_s2", "ism."), "ism.pi_rad_s2");
    s.boundary_layer = num_or(ism, "boundary_layer_rad_s", 0.0, "ism.");
    if (s.gains) s.gains->m = s.m;

    const json& delay = need(j, "delay", "");
    s.delay.tau_star = num(need(delay, "tau_star_s", "delay."), "delay.tau_star_s");
    s.delay.tau_g = num_or(delay, "tau_g", 1.0, "delay.");
    s.tau_g_synthesis = num_or(delay, "tau_g_synthesis", 0.999, "delay.");
    if (delay.contains("tau_initial_s") && !delay.at("tau_initial_s").is_null()) {
      s.tau_initial = num(delay.at("tau_initial_s"), "delay.tau_initial_s");
    }
    if (delay.contains("seed")) {
      if (!delay.at("seed").is_number_unsigned()) bad("delay.seed", "expected a nonnegative integer");
      s.seed = delay.at("seed").get<std::uint64_t>();
    }

    if (j.contains("synthesis")) {
      const json& sy = j.at("synthesis");
      auto& o = s.synthesis;
      if (sy.contains("form")) o.form = parse_form(sy.at("form").get<std::string>(), "synthesis.form");
      o.reduced = sy.value("reduced", o.reduced);
      if (sy.contains("objective")) {
        const std::string obj = sy.at("objective").get<std::string>();
        if (obj == "min_lambda_max") {
          o.objective = SynthesisObjective::kMinLambdaMax;
        } else if (obj == "max_gain_sum") {
          o.objective = SynthesisObjective::kMaxGainSum;
        } else {
          bad("synthesis.objective", "expected 'min_lambda_max' or 'max_gain_sum'");
        }
      }
      o.target_margin = num_or(sy, "target_margin", o.target_margin, "synthesis.");
      o.k_min = num_or(sy, "k_min", o.k_min, "synthesis.");
      o.k_max = num_or(sy, "k_max", o.k_max, "synthesis.");
      o.eps = num_or(sy, "eps", o.eps, "synthesis.");
      o.eps_margin = num_or(sy, "eps_margin", o.eps_margin, "synthesis.");
      o.kappa = num_or(sy, "kappa", o.kappa, "synthesis.");
      o.box = num_or(sy, "box", o.box, "synthesis.");
    }

    if (j.contains("plant")) {
      const json& pl = j.at("plant");
      const std::string model = pl.value("model", std::string("droop"));
      if (model == "droop") {
        s.plant = PlantModel::kDroop;
      } else if (model == "frozen_disturbance") {
        s.plant = PlantModel::kFrozenDisturbance;
      } else {
        bad("plant.model", "expected 'droop' or 'frozen_disturbance'");
      }
      const std::string filters = pl.value("filters", std::string("instantaneous"));
      if (filters == "instantaneous") {
        s.filters = FilterInit::kInstantaneous;
      } else if (filters == "zero") {
        s.filters = FilterInit::kZero;
      } else {
        bad("plant.filters", "expected 'instantaneous' or 'zero'");
      }
      if (pl.contains("delta0_rad")) s.delta0 = per_dg(pl.at("delta0_rad"), n, "plant.delta0_rad");
      if (pl.contains("v0_v")) s.v0 = per_dg(pl.at("v0_v"), n, "plant.v0_v");
    }

    if (j.contains("events")) {
      for (std::size_t i = 0; i < j.at("events").size(); ++i) {
        s.events.push_back(parse_event(j.at("events")[i], n, "events[" + std::to_string(i) + "]"));
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCategory::kConfig, std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace mgsync
