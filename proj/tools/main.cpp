// mgsync command-line tool: simulate, synth, check, metrics.

#include "mgsync/engine.hpp"
#include "mgsync/errors.hpp"
#include "mgsync/gains_io.hpp"
#include "mgsync/lmi.hpp"
#include "mgsync/metrics.hpp"
#include "mgsync/output.hpp"
#include "mgsync/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using mgsync::ErrorCategory;
using mgsync::fail;

namespace {

constexpr int kUsageExit = 2;

mgsync::GainsFile synthesize(const mgsync::Scenario& s) {
  mgsync::DelayBounds bounds{s.delay.tau_star, s.tau_g_synthesis};
  const auto res = mgsync::synthesize_gains(s.comm_topology(), bounds, s.synthesis);
  if (!res.feasible) {
    fail(ErrorCategory::kInfeasible, "no certificate found; best -lambda_max(Xi) = " + std::to_string(res.best_margin));
  }
  mgsync::GainsFile f;
  f.n_dg = s.size();
  f.gains = res.gains;
  f.form = s.synthesis.form;
  f.reduced = s.synthesis.reduced;
  f.bounds = bounds;
  f.certificate = res.certificate;
  f.basis = res.basis;
  return f;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 std::optional<double> step, const std::string& emit, int decimation, std::optional<int> stride) {
  mgsync::Scenario s = mgsync::load_scenario(scenario_path);
  bool want_csv = false;
  bool want_svg = false;
  for (const auto& e : split(emit, ',')) {
    if (e == "csv") {
      want_csv = true;
    } else if (e == "svg") {
      want_svg = true;
    } else {
      fail(ErrorCategory::kConfig, "--emit: unknown format '" + e + "'");
    }
  }
  if (!s.gains) {
    const auto f = synthesize(s);
    s.gains = f.gains;
    s.gains->m = s.m;
    std::cout << "synthesized gains, margin " << f.certificate.margin << "\n";
  }
  mgsync::RunOptions opt;
  opt.seed = seed;
  opt.step = step;
  opt.record_stride = stride;
  const auto tr = mgsync::run(s, opt);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create " + out_dir + ": " + ec.message());
  if (want_csv) {
    const fs::path p = fs::path(out_dir) / "trajectory.csv";
    mgsync::write_csv(tr, p, decimation);
    std::cout << "wrote " << p.string() << "\n";
  }
  if (want_svg) {
    const fs::path p = fs::path(out_dir) / "trajectory.svg";
    mgsync::write_svg(tr, p, s.name);
    std::cout << "wrote " << p.string() << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& scenario_path, const std::string& out) {
  const auto s = mgsync::load_scenario(scenario_path);
  const auto f = synthesize(s);
  mgsync::save_gains(f, out);
  std::cout << "margin " << f.certificate.margin << "\n";
  for (const auto& [e, v] : f.gains.k) {
    std::cout << "k " << e.first + 1 << " " << (e.second == mgsync::kLeader ? 0 : e.second + 1) << " " << v << "\n";
  }
  for (const auto& [e, v] : f.gains.k_bar) std::cout << "k_bar " << e.first + 1 << " " << e.second + 1 << " " << v << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_check(const std::string& gains_path, const std::string& scenario_path) {
  const auto f = mgsync::load_gains(gains_path);
  const auto s = mgsync::load_scenario(scenario_path);
  const mgsync::Matrix a = mgsync::certified_dynamics(f, s.comm_topology());
  const auto chk = mgsync::check_certificate(a, f.bounds, f.certificate, {1e-8, f.form});
  std::cout << "lambda_max(Xi) " << chk.lambda_max_xi << "\n"
            << "margin " << chk.margin << "\n"
            << "lambda_min Q R P " << chk.lambda_min_q << " " << chk.lambda_min_r << " " << chk.lambda_min_p << "\n";
  if (!chk.accepted) fail(ErrorCategory::kInfeasible, "certificate rejected: " + chk.reason);
  std::cout << "accepted\n";
  return 0;
}

int cmd_metrics(const std::string& csv_path, std::optional<double> from, std::optional<double> to) {
  const auto tr = mgsync::read_csv(fs::path(csv_path));
  const double t_end = tr.t.back();
  const mgsync::Window w{from.value_or(tr.t.front()), to.value_or(t_end), true};
  const auto last = static_cast<Eigen::Index>(tr.size() - 1);

  nlohmann::json j;
  j["records"] = tr.size();
  j["n_dg"] = tr.n_dg;
  j["window_s"] = {w.t0, w.t1};
  const auto s_max = mgsync::max_abs_sliding(tr, w);
  const auto rate = mgsync::max_disturbance_rate(tr, w);
  double spread_lo = std::numeric_limits<double>::infinity();
  double spread_hi = -spread_lo;
  for (int i = 0; i < tr.n_dg; ++i) {
    spread_lo = std::min(spread_lo, tr.omega(last, i));
    spread_hi = std::max(spread_hi, tr.omega(last, i));
  }
  const double mean_final = tr.omega.row(last).mean();
  const auto settle = mgsync::settling_time(tr, w, mean_final);
  for (int i = 0; i < tr.n_dg; ++i) {
    nlohmann::json d;
    d["dg"] = i + 1;
    d["omega_final_rad_s"] = tr.omega(last, i);
    d["max_abs_S_rad_s"] = s_max[i];
    d["max_disturbance_rate_rad_s2"] = rate[i];
    d["settling_time_s"] = std::isnan(settle[i]) ? nlohmann::json(nullptr) : nlohmann::json(settle[i]);
    j["per_dg"].push_back(d);
  }
  j["omega_spread_final_rad_s"] = spread_hi - spread_lo;
  for (int i = 0; i < tr.n_dg; ++i) {
    for (int k = i + 1; k < tr.n_dg; ++k) {
      const double pk = tr.p(last, k);
      j["power_ratio_final"].push_back({i + 1, k + 1, pk != 0.0 ? nlohmann::json(tr.p(last, i) / pk) : nlohmann::json(nullptr)});
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Droop microgrid secondary-control simulator and LMI gain synthesis"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write the trajectory");
  std::string sim_scenario;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_step;
  std::string sim_emit = "csv";
  int sim_decimation = 1;
  std::optional<int> sim_stride;
  sim->add_option("scenario", sim_scenario, "Scenario file")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--seed", sim_seed, "Delay RNG seed (overrides the scenario)");
  sim->add_option("--step", sim_step, "Integration step h [s]")->check(CLI::PositiveNumber);
  sim->add_option("--emit", sim_emit, "Comma-separated outputs: csv, svg");
  sim->add_option("--decimation", sim_decimation, "Write every n-th record to the CSV")->check(CLI::PositiveNumber);
  sim->add_option("--record-stride", sim_stride, "Keep every n-th step in memory")->check(CLI::PositiveNumber);

  auto* syn = app.add_subcommand("synth", "Synthesize gains and a stability certificate");
  std::string syn_scenario;
  std::string syn_out;
  syn->add_option("scenario", syn_scenario, "Scenario file")->required();
  syn->add_option("--out", syn_out, "Gains file to write")->required();

  auto* chk = app.add_subcommand("check", "Verify a gains + certificate file against a scenario topology");
  std::string chk_gains;
  std::string chk_scenario;
  chk->add_option("gains", chk_gains, "Gains file")->required();
  chk->add_option("scenario", chk_scenario, "Scenario file")->required();

  auto* met = app.add_subcommand("metrics", "Summarize a trajectory CSV");
  std::string met_csv;
  std::optional<double> met_from;
  std::optional<double> met_to;
  met->add_option("trajectory", met_csv, "Trajectory CSV")->required();
  met->add_option("--from", met_from, "Window start [s]");
  met->add_option("--to", met_to, "Window end [s]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kUsageExit;
  }

  try {
    if (*sim) return cmd_simulate(sim_scenario, sim_out, sim_seed, sim_step, sim_emit, sim_decimation, sim_stride);
    if (*syn) return cmd_synth(syn_scenario, syn_out);
    if (*chk) return cmd_check(chk_gains, chk_scenario);
    if (*met) return cmd_metrics(met_csv, met_from, met_to);
  } catch (const mgsync::Error& e) {
    std::cerr << "error: " << mgsync::category_name(e.category()) << ": " << e.what() << "\n";
    return mgsync::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return kUsageExit;
}
