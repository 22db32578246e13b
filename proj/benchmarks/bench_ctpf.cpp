// Copyright 2026 The ctpf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ctpf/dataset.hpp"
#include "ctpf/latent_model.hpp"
#include "ctpf/log_weights.hpp"
#include "ctpf/particle_filter.hpp"
#include "ctpf/random.hpp"
#include "ctpf/resampling.hpp"
#include "ctpf/sde.hpp"
#include "ctpf/wiener.hpp"

namespace {

using namespace ctpf;

void BM_SampleSegment(benchmark::State& state) {
  const double dt = 1.0 / static_cast<double>(state.range(0));
  Philox4x32 rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_wiener_segment(1.0, dt, 1, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleSegment)->Arg(100)->Arg(1000);

void BM_EulerMaruyama(benchmark::State& state) {
  const SdeFunctions gbm = ProcessSpec::gbm().sde();
  Philox4x32 rng(2, 0);
  const WienerSegment seg = sample_wiener_segment(1.0, 1.0 / static_cast<double>(state.range(0)), 1, rng);
  const std::vector<double> z0 = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(euler_maruyama(gbm, z0, 0.0, seg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerMaruyama)->Arg(1000);

void BM_AugmentedSolve(benchmark::State& state) {
  const bool car = state.range(0) == 1;
  const ProcessSpec process = car ? ProcessSpec::car4() : ProcessSpec::gbm();
  const auto model = oracle_model(process, car ? 30.0 : 1e-2, 1.0);
  const ObservationSequence target{TimeGrid({1.0}), {{car ? 0.5 : 1.2}}};
  const std::vector<double> z0 = model->initial_state();
  const ProposalContext context{0.0, 1.0, z0, &target, 0, true};
  const VectorField drift = model->posterior_drift(context);
  Philox4x32 rng(3, 0);
  const WienerSegment seg = sample_wiener_segment(1.0, 1e-3, process.state_dim(), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(augmented_solve(model->prior(), drift, z0, 0.0, seg));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
  state.SetLabel(car ? "car4" : "gbm");
}
BENCHMARK(BM_AugmentedSolve)->Arg(0)->Arg(1);

void BM_PfStep(benchmark::State& state) {
  const auto model = oracle_model(ProcessSpec::gbm(), 1e-2, 1.0);
  const ObservationSequence seq{TimeGrid({0.5}), {{1.1}}};
  FilterConfig config;
  config.particles = static_cast<std::size_t>(state.range(0));
  config.dt = 1e-3;
  const std::vector<double> z0 = {1.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    ParticleSet particles(config.particles, z0);
    state.ResumeTiming();
    benchmark::DoNotOptimize(pf_step(particles, *model, seq, 0, config, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PfStep)->Arg(125)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_Resample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scheme = state.range(1) == 0 ? ResampleScheme::kSystematic : ResampleScheme::kMultinomial;
  std::vector<double> lw(n);
  Philox4x32 init(4, 0);
  for (double& w : lw) w = -3.0 * uniform01(init);
  Philox4x32 rng(5, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_indices(lw, n, scheme, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel(std::string(to_string(scheme)));
}
BENCHMARK(BM_Resample)->Args({125, 0})->Args({125, 1})->Args({10000, 0})->Args({10000, 1});

void BM_EffectiveSampleSize(benchmark::State& state) {
  std::vector<double> lw(static_cast<std::size_t>(state.range(0)));
  Philox4x32 init(6, 0);
  for (double& w : lw) w = -3.0 * uniform01(init);
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_sample_size(lw));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EffectiveSampleSize)->Arg(125)->Arg(10000);

void BM_FilterSequence(benchmark::State& state) {
  SimulationConfig sim;
  sim.sequences = 1;
  sim.seed = 1;
  sim.dt = 1e-3;
  const Dataset data = simulate_dataset(ProcessSpec::gbm(), sim);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  FilterConfig config;
  config.dt = 1e-3;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_filter(*model, data.sequences[0], config, ++seed));
  }
  state.SetLabel(std::to_string(data.sequences[0].size()) + " observations, N=125");
}
BENCHMARK(BM_FilterSequence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
