#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ccnli/codebook.hpp"
#include "ccnli/fft.hpp"
#include "ccnli/field.hpp"
#include "ccnli/perturbation.hpp"
#include "ccnli/rng.hpp"
#include "ccnli/ssfm.hpp"

using namespace ccnli;

namespace {

std::vector<cplx> noise(std::size_t n, std::uint64_t seed) {
  SplitMix64 g(seed);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g.normal(), g.normal()};
  return v;
}

void BM_Si(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(si(x));
    x = x > 100.0 ? -100.0 : x + 0.37;
  }
}
BENCHMARK(BM_Si);

void BM_Chi(benchmark::State& state) {
  const double z = normalize(PhysicalParams{}).to_normalized_distance(2000.0);
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chi(1, j, z));
}
BENCHMARK(BM_Chi)->Arg(0)->Arg(50)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Fft fft(n);
  auto v = noise(n, 1);
  for (auto _ : state) {
    fft.forward(v, v);
    benchmark::ClobberMemory();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_Disperse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampledSignal s(noise(n, 2), 0.125, -0.0625 * n);
  for (auto _ : state) benchmark::DoNotOptimize(disperse(s, 10.0, Boundary::periodic));
}
BENCHMARK(BM_Disperse)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMicrosecond);

// 100 km of lossless fiber at -10 dBm per sample, 2^15 samples.
void BM_Propagate100km(benchmark::State& state) {
  const std::size_t n = std::size_t{1} << 15;
  const auto map = normalize(PhysicalParams{});
  auto v = noise(n, 3);
  const double a = std::sqrt(map.to_normalized_power(1e-4) / 2.0);
  for (auto& x : v) x *= a;
  const SampledSignal s(std::move(v), 0.125, -0.0625 * n);
  LinkSpec link;
  link.total_length_km = 100.0;
  PropagationStats st;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(s, link, StepPolicy{}, 0, &st));
  state.counters["steps"] = static_cast<double>(st.steps);
}
BENCHMARK(BM_Propagate100km)->Unit(benchmark::kMillisecond);

void BM_CcFrames(benchmark::State& state) {
  const auto u = base_word(lowest_energy_subset(qam(256), 171));
  for (auto _ : state) benchmark::DoNotOptimize(cc_frames(u, 24, 7));
}
BENCHMARK(BM_CcFrames)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
