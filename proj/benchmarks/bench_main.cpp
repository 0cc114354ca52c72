/*
 * Copyright 2026 The fuzentra Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>

#include <benchmark/benchmark.h>

#include "fuzentra/cca.hpp"
#include "fuzentra/emd.hpp"
#include "fuzentra/entropy.hpp"
#include "fuzentra/synth.hpp"

using namespace fuzentra;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

void BM_FuzzyEntropy(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  const entropy::EntropyParams p;
  for (auto _ : state) benchmark::DoNotOptimize(entropy::fuzzy_entropy(x, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FuzzyEntropy)->RangeMultiplier(2)->Range(128, 4096)->Complexity(benchmark::oNSquared);

void BM_SampleEntropy(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(entropy::sample_entropy(x, 2, 0.2));
}
BENCHMARK(BM_SampleEntropy)->Arg(1024)->Arg(2500);

// One SSVEP channel: 10 s at 250 Hz, 20 scales.
void BM_InherentProfile(benchmark::State& state) {
  const TimeSeries x(noise(2500, 3), 250.0);
  for (auto _ : state) benchmark::DoNotOptimize(entropy::multiscale_profile(x, {}));
}
BENCHMARK(BM_InherentProfile)->Unit(benchmark::kMillisecond);

void BM_EmdDecompose(benchmark::State& state) {
  const TimeSeries x(noise(static_cast<std::size_t>(state.range(0)), 4), 250.0);
  for (auto _ : state) benchmark::DoNotOptimize(emd::decompose(x));
}
BENCHMARK(BM_EmdDecompose)->Arg(2500)->Arg(15000)->Unit(benchmark::kMillisecond);

void BM_CcaSolveAndDenoise(benchmark::State& state) {
  synth::CohortSpec spec;
  spec.rest_seconds = 1.0;
  const auto epochs = synth::gen_subject(spec, synth::Group::HealthyControl, 5);
  const auto& e = epochs.back();
  const auto tmpl = cca::make_template(15.0, e.length(), e.sample_rate());
  for (auto _ : state) {
    const auto sol = cca::cca_solve(e, tmpl);
    benchmark::DoNotOptimize(cca::denoise(e, sol, 2));
  }
}
BENCHMARK(BM_CcaSolveAndDenoise)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
