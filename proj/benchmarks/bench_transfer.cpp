#include <benchmark/benchmark.h>

#include "thermo/thermo.hpp"

using namespace thermo;

namespace {

MapModel deformed() {
  SmoothSpec sp;
  sp.epsilon = 0.2;
  sp.partition_depth = 2;
  return MapModel::smooth_deformation(sp, {1, 2});
}

void BM_BuildTree(benchmark::State& state) {
  const int n = int(state.range(0));
  for (auto _ : state) {
    CylinderTree tree(deformed());
    tree.build_to(n);
    benchmark::DoNotOptimize(tree.count(n));
  }
  state.SetComplexityN(1 << n);
}
BENCHMARK(BM_BuildTree)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const int n = int(state.range(0));
  CylinderTree tree(deformed());
  tree.build_to(n);
  auto phi = Potential::fourier(0.0, {0.1});
  for (auto _ : state) benchmark::DoNotOptimize(assemble(tree, phi, n).nonzeros());
}
BENCHMARK(BM_Assemble)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

void BM_Apply(benchmark::State& state) {
  const int n = int(state.range(0));
  CylinderTree tree(deformed());
  auto m = assemble(tree, Potential::fourier(0.0, {0.1}), n);
  std::vector<double> g(m.dim, 1.0), out(m.dim);
  for (auto _ : state) {
    apply_into(m, g, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(m.nonzeros()));
}
BENCHMARK(BM_Apply)->DenseRange(10, 16, 2);

void BM_LeadingSpectrum(benchmark::State& state) {
  const int n = int(state.range(0));
  CylinderTree tree(deformed());
  auto m = assemble(tree, Potential::fourier(0.0, {0.1}), n);
  for (auto _ : state) benchmark::DoNotOptimize(leading_spectrum(m).lambda);
}
BENCHMARK(BM_LeadingSpectrum)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

void BM_SpectralGap(benchmark::State& state) {
  const int n = int(state.range(0));
  CylinderTree tree(deformed());
  auto m = assemble(tree, Potential::fourier(0.0, {0.1}), n);
  auto s = leading_spectrum(m);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(m, s, 1e-9, 0).xi);
}
BENCHMARK(BM_SpectralGap)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
