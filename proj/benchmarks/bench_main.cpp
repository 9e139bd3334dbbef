#include <benchmark/benchmark.h>

#include <cmath>

#include "ghostlab/detection.hpp"
#include "ghostlab/linalg.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/special_functions.hpp"
#include "ghostlab/typeone.hpp"
#include "ghostlab/typetwo.hpp"

using namespace ghostlab;

namespace {

FieldGrid gaussian_field(std::size_t n) {
  const GridSpec g{n, n, 10e-6, 10e-6};
  FieldGrid f(g, 632.8e-9);
  const double w = 0.3e-3;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 p = g.position(i, j);
      f.at(i, j) = std::exp(-(p.x * p.x + p.y * p.y) / (w * w));
    }
  }
  return f;
}

void BM_PropagateTransform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FieldGrid f = gaussian_field(n);
  // Keep the sampling ratio near 1.
  const double z = static_cast<double>(n) * 1e-10 / 632.8e-9;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_free(f, z, PropagationMethod::Transform));
}
BENCHMARK(BM_PropagateTransform)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PropagateDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FieldGrid f = gaussian_field(n);
  const double z = static_cast<double>(n) * 1e-10 / 632.8e-9;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_free(f, z, PropagationMethod::Direct));
}
BENCHMARK(BM_PropagateDirect)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Somb(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(somb(x));
    x += 1e-3;
    if (x > 40.0) x = 0.1;
  }
}
BENCHMARK(BM_Somb);

void BM_BiphotonWavefunction(benchmark::State& state) {
  const BiphotonGeometry g{0.05, 0.05, 0.1, 0.05, 0.3e-3, 700e-9};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(biphoton_wavefunction({x, 0.0}, {-2.0 * x, 1e-6}, g));
    x += 1e-7;
    if (x > 1e-4) x = 0.0;
  }
}
BENCHMARK(BM_BiphotonWavefunction);

TwoArmGeometry bench_arms() {
  TwoArmGeometry g;
  g.z1 = 0.5;
  g.z2 = 0.5;
  g.wavelength = 532e-9;
  return g;
}

void BM_SampleRealization(benchmark::State& state) {
  const ChaoticSource src =
      ChaoticSource::make({SourceShape::Disk, 1e-3}, static_cast<std::size_t>(state.range(0)), 3);
  const TwoArmGeometry arms = bench_arms();
  std::vector<Vec2> probes;
  for (int i = 0; i < 64; ++i) probes.push_back({(i - 32) * 5e-6, 0.0});
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_realization(src, arms, probes, probes, r++));
}
BENCHMARK(BM_SampleRealization)->Arg(100)->Arg(1000);

void BM_G2ThermalMc(benchmark::State& state) {
  const ChaoticSource src = ChaoticSource::make({SourceShape::Disk, 1e-3}, 300, 3);
  const TwoArmGeometry arms = bench_arms();
  std::vector<std::pair<Vec2, Vec2>> pairs;
  for (int i = 0; i < 32; ++i) pairs.push_back({{(i - 16) * 10e-6, 0.0}, {0.0, 0.0}});
  MonteCarloOptions opt;
  opt.require_precision = false;
  for (auto _ : state) benchmark::DoNotOptimize(g2_thermal_mc(src, arms, pairs, 2000, opt));
}
BENCHMARK(BM_G2ThermalMc)->Unit(benchmark::kMillisecond);

void BM_Rank1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      m(i, j) = 1.0 + std::exp(-d * d / 8.0);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(rank1_residual(m));
}
BENCHMARK(BM_Rank1)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
