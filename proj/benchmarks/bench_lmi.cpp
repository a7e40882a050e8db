#include "mgsync/linalg.hpp"
#include "mgsync/lmi.hpp"

#include <benchmark/benchmark.h>

namespace {

mgsync::CommTopology line(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return {n, edges, {0}};
}

void BM_Synthesize(benchmark::State& state) {
  const auto top = line(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mgsync::synthesize_gains(top, {0.5, 0.999}));
}
BENCHMARK(BM_Synthesize)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CheckCertificate(benchmark::State& state) {
  const auto res = mgsync::synthesize_gains(line(4), {0.5, 0.999});
  const mgsync::CheckOptions opt{1e-8, mgsync::LmiForm::kJensen};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgsync::check_certificate(res.a, {0.5, 0.999}, res.certificate, opt));
  }
}
BENCHMARK(BM_CheckCertificate);

void BM_Eigenvalues(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(n, n);
  const Eigen::MatrixXd m = r + r.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(mgsync::lambda_max(m));
}
BENCHMARK(BM_Eigenvalues)->Arg(16)->Arg(32)->Arg(64);

}  // namespace
