#include "mgsync/comms.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_DelayTrace(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mgsync::generate_delay_trace({0.5, 1.0}, 5e-5, 10.0, 1));
  state.SetItemsProcessed(state.iterations() * 200000);
}
BENCHMARK(BM_DelayTrace)->Unit(benchmark::kMillisecond);

void BM_BufferPushQuery(benchmark::State& state) {
  const double h = 5e-5;
  mgsync::HistoryBuffer buf(0.5, h, Eigen::VectorXd::Zero(8));
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(8);
  long k = 0;
  for (auto _ : state) {
    const double t = static_cast<double>(k++) * h;
    buf.push(t, v);
    benchmark::DoNotOptimize(buf.query(t - 0.37));
  }
}
BENCHMARK(BM_BufferPushQuery);

}  // namespace

BENCHMARK_MAIN();
