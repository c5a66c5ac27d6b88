#include <benchmark/benchmark.h>

#include "relay_osc/bounds.hpp"
#include "relay_osc/limit_cycle.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/poincare.hpp"
#include "relay_osc/random.hpp"
#include "relay_osc/sfs.hpp"

namespace ro = relay_osc;

namespace {

ro::StateSpace second_order() {
  const std::vector<double> num{1, -1}, den{6, 5, 1};
  return ro::realize(ro::parse_plant(num, den));
}

ro::StateSpace third_order() {
  const std::vector<double> num{1, -1}, den{6, 5, 3, 1};
  return ro::realize(ro::parse_plant(num, den));
}

void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ro::CounterRng rng(1);
  ro::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ro::expm(m, 1.3));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_ExitMap(benchmark::State& state) {
  const ro::RelaySystem sys(second_order());
  ro::Vector x(2);
  x << 3.0, 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(sys.exit_map(x, 1));
}
BENCHMARK(BM_ExitMap);

void BM_SpectralSurvey(benchmark::State& state) {
  const auto ss = second_order();
  const ro::RelaySystem sys(ss);
  const auto d = ro::make_set_d(ss, ro::bounds_report(ss, ro::decay_envelope(ss.a)));
  ro::SurveyOptions opt;
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ro::spectral_survey(sys, d, 1000, 1, 7, opt));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SpectralSurvey)->Unit(benchmark::kMillisecond);

void BM_RootLocus(benchmark::State& state) {
  const auto ss = third_order();
  for (auto _ : state) benchmark::DoNotOptimize(ro::root_locus(ss));
}
BENCHMARK(BM_RootLocus)->Unit(benchmark::kMillisecond);

void BM_FindOrbit(benchmark::State& state) {
  const ro::RelaySystem sys(second_order());
  for (auto _ : state) benchmark::DoNotOptimize(ro::find_symmetric_orbit(sys));
}
BENCHMARK(BM_FindOrbit)->Unit(benchmark::kMillisecond);

void BM_SfsStiff(benchmark::State& state) {
  const auto ss = third_order();
  ro::SfsConfig cfg;
  cfg.gamma = 1e5;
  ro::Vector x0 = ro::Vector::Constant(3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ro::simulate_sfs(ss, cfg, x0, 20.0));
}
BENCHMARK(BM_SfsStiff)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
