#include <benchmark/benchmark.h>

#include <memory>

#include "thermo/thermo.hpp"

using namespace thermo;

namespace {

struct Setup {
  std::unique_ptr<CylinderTree> tree;
  std::unique_ptr<CylinderMeasure> mu;
  std::unique_ptr<OrbitSampler> sampler;

  explicit Setup(int level) {
    tree = std::make_unique<CylinderTree>(MapModel::doubling());
    tree->build_to(level);
    auto m = assemble(*tree, Potential::fourier(0.0, {0.3}), level);
    auto s = leading_spectrum(m);
    mu = std::make_unique<CylinderMeasure>(equilibrium_measure(*tree, s));
    sampler = std::make_unique<OrbitSampler>(*mu);
  }
};

void BM_SamplerStep(benchmark::State& state) {
  Setup st(int(state.range(0)));
  Rng rng(1);
  std::size_t s = st.sampler->draw_state(rng);
  for (auto _ : state) {
    s = st.sampler->step(s, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SamplerStep)->Arg(10)->Arg(14)->Arg(16);

void BM_OrbitPoints(benchmark::State& state) {
  Setup st(14);
  Rng rng(2);
  std::vector<std::uint32_t> states;
  st.sampler->run(st.sampler->draw_state(rng), std::size_t(state.range(0)), rng, states);
  for (auto _ : state) benchmark::DoNotOptimize(st.sampler->points(states, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OrbitPoints)->Arg(64)->Arg(1024);

void BM_HittingExperiment(benchmark::State& state) {
  Setup st(12);
  const int n = int(state.range(0));
  for (auto _ : state) {
    auto e = run_hitting(*st.sampler, n, 3, 2000, 10.0, StartLaw::Measure, 7);
    benchmark::DoNotOptimize(e.censored);
  }
}
BENCHMARK(BM_HittingExperiment)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ReturnTimes(benchmark::State& state) {
  Setup st(16);
  for (auto _ : state) {
    auto r = sample_returns(*st.sampler, 12, 1000, 1 << 18, 3);
    benchmark::DoNotOptimize(r.censored);
  }
}
BENCHMARK(BM_ReturnTimes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
