#include "mgsync/engine.hpp"
#include "mgsync/plant.hpp"
#include "mgsync/scenario.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

namespace {

mgsync::Scenario reference() {
  return mgsync::load_scenario(std::filesystem::path(MGSYNC_SCENARIO_DIR) / "paper_sec6.scenario");
}

void BM_ReferenceRun(benchmark::State& state) {
  mgsync::Scenario s = reference();
  s.duration = static_cast<double>(state.range(0));
  s.events.resize(2);
  for (auto _ : state) benchmark::DoNotOptimize(mgsync::run(s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.steps()));
}
BENCHMARK(BM_ReferenceRun)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_PowerFlow(benchmark::State& state) {
  const mgsync::Scenario s = reference();
  const auto graph = s.electrical_graph();
  std::vector<mgsync::DgState> st(4, {0.01, 220.0, 1e4, 1e4});
  st[1].delta = -0.02;
  std::vector<mgsync::PowerInjection> loads(4, {1e4, 1e4});
  for (auto _ : state) benchmark::DoNotOptimize(mgsync::power_flow(st, graph, loads));
}
BENCHMARK(BM_PowerFlow);

}  // namespace
