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

#include "ctpf/particle_filter.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ctpf/errors.hpp"
#include "ctpf/log_weights.hpp"

namespace ctpf {

struct ParticleSetAccess {
  static std::vector<double>& states(ParticleSet& p) { return p.states_; }
  static std::vector<std::size_t>& ancestors(ParticleSet& p) { return p.ancestors_; }
  static std::vector<SegmentHistoryPtr>& histories(ParticleSet& p) { return p.histories_; }
};

void ResamplePolicy::validate() const {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw ArgumentError("resampling threshold fraction must be in (0, 1]");
  }
}

void FilterConfig::validate() const {
  if (particles == 0) {
    throw ArgumentError("number of particles must be at least 1");
  }
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw ArgumentError("filter dt must be finite and positive");
  }
  policy.validate();
}

std::vector<std::shared_ptr<const WienerSegment>> unroll(const SegmentHistoryPtr& history) {
  std::vector<std::shared_ptr<const WienerSegment>> out;
  out.reserve(history ? history->length : 0);
  for (const SegmentHistory* node = history.get(); node != nullptr; node = node->previous.get()) {
    out.push_back(node->segment);
  }
  return {out.rbegin(), out.rend()};
}

ParticleSet::ParticleSet(std::size_t count, std::span<const double> initial_state)
    : dim_(initial_state.size()),
      log_weights_(count, -std::log(static_cast<double>(count))),
      ancestors_(count),
      histories_(count) {
  if (count == 0 || dim_ == 0) {
    throw ArgumentError("particle set needs at least one particle and a non-empty state");
  }
  states_.reserve(count * dim_);
  for (std::size_t j = 0; j < count; ++j) {
    states_.insert(states_.end(), initial_state.begin(), initial_state.end());
  }
  std::iota(ancestors_.begin(), ancestors_.end(), std::size_t{0});
}

std::vector<double> ParticleSet::weights() const {
  std::vector<double> w(log_weights_.size());
  const double total = log_sum_exp(log_weights_);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(log_weights_[j] - total);
  return w;
}

StepOutcome pf_step(ParticleSet& particles, const LatentSdeModel& model, const ObservationSequence& observations,
                    std::size_t index, const FilterConfig& config, std::uint64_t seed, ThreadPool* pool) {
  if (index >= observations.size()) {
    throw ArgumentError("step index past the end of the observations");
  }
  if (particles.dim() != model.state_dim()) {
    throw ArgumentError("particle dimension does not match the model");
  }
  if (std::abs(log_sum_exp(particles.log_weights())) > 1e-9) {
    throw ArgumentError("pf_step expects normalized input weights");
  }
  const std::size_t n = particles.size();
  const std::size_t d = particles.dim();
  const double t_start = observations.grid.interval_start(index);
  const double t_end = observations.grid[index];
  const double duration = t_end - t_start;
  const std::vector<double>& x = observations.values[index];
  const ObservationHistory history{&observations, index};

  auto& states = ParticleSetAccess::states(particles);
  auto& histories = ParticleSetAccess::histories(particles);
  std::span<double> log_weights = particles.log_weights();
  std::vector<std::uint64_t> draws(n, 0);

  auto propagate = [&](std::size_t j) {
    try {
      std::span<double> z(states.data() + j * d, d);
      WienerSegment segment;
      if (config.segment_source) {
        segment = config.segment_source(index, j, duration, config.dt, d);
      } else {
        auto rng = make_stream(seed, StreamDomain::kPropagation, index, j);
        segment = sample_wiener_segment(duration, config.dt, d, rng);
        draws[j] = rng.draws();
      }
      ProposalContext context{t_start, t_end, z, &observations, index, true};
      const VectorField drift = model.posterior_drift(context);
      AugmentedResult solved = augmented_solve(model.prior(), drift, z, t_start, segment, config.solver);
      std::copy(solved.terminal_state.begin(), solved.terminal_state.end(), z.begin());
      const double loglik = model.decoder_loglik(z, x, history);
      log_weights[j] += loglik + solved.log_m;
      if (config.keep_segments) {
        auto shared = std::make_shared<const WienerSegment>(std::move(segment));
        const std::size_t length = histories[j] ? histories[j]->length + 1 : 1;
        histories[j] = std::make_shared<const SegmentHistory>(SegmentHistory{std::move(shared), histories[j], length});
      }
    } catch (Error& e) {
      e.add_context("particle " + std::to_string(j));
      throw;
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(n, propagate);
  } else {
    for (std::size_t j = 0; j < n; ++j) propagate(j);
  }

  StepOutcome outcome;
  outcome.incremental_log_lik = normalize_log_weights(log_weights);
  auto& ancestors = ParticleSetAccess::ancestors(particles);
  std::iota(ancestors.begin(), ancestors.end(), std::size_t{0});
  outcome.rng_draws = std::accumulate(draws.begin(), draws.end(), std::uint64_t{0});
  return outcome;
}

std::uint64_t resample(ParticleSet& particles, ResampleScheme scheme, Philox4x32& rng) {
  const std::uint64_t before = rng.draws();
  const std::size_t n = particles.size();
  const std::size_t d = particles.dim();
  const std::vector<std::size_t> picks = resample_indices(particles.log_weights(), n, scheme, rng);

  auto& states = ParticleSetAccess::states(particles);
  auto& histories = ParticleSetAccess::histories(particles);
  std::vector<double> new_states(states.size());
  std::vector<SegmentHistoryPtr> new_histories(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::copy_n(states.begin() + static_cast<std::ptrdiff_t>(picks[k] * d), d,
                new_states.begin() + static_cast<std::ptrdiff_t>(k * d));
    new_histories[k] = histories[picks[k]];
  }
  states.swap(new_states);
  histories.swap(new_histories);
  ParticleSetAccess::ancestors(particles) = picks;
  const double uniform = -std::log(static_cast<double>(n));
  for (double& lw : particles.log_weights()) lw = uniform;
  return rng.draws() - before;
}

FilterResult run_filter(const LatentSdeModel& model, const ObservationSequence& observations,
                        const FilterConfig& config, std::uint64_t seed, ThreadPool* pool,
                        const StepObserver& observer) {
  config.validate();
  if (observations.size() == 0) {
    throw ArgumentError("cannot filter an empty observation sequence");
  }
  observations.validate(model.obs_dim());

  FilterResult result;
  result.seed = seed;
  const std::vector<double> z0 = model.initial_state();
  if (z0.size() != model.state_dim()) {
    throw ArgumentError("model initial state has the wrong dimension");
  }
  result.particles = ParticleSet(config.particles, z0);
  result.steps.reserve(observations.size());
  const std::size_t n = config.particles;

  for (std::size_t i = 0; i < observations.size(); ++i) {
    const StepOutcome outcome = pf_step(result.particles, model, observations, i, config, seed, pool);
    result.rng_draws += outcome.rng_draws;
    StepRecord record;
    record.t = observations.grid[i];
    record.incremental_log_lik = outcome.incremental_log_lik;
    record.ess_before = effective_sample_size(result.particles.log_weights());
    if (config.policy.should_resample(record.ess_before, n)) {
      auto rng = make_stream(seed, StreamDomain::kResampling, i);
      result.rng_draws += resample(result.particles, config.policy.scheme, rng);
      record.resampled = true;
    }
    result.total_log_likelihood += record.incremental_log_lik;
    result.steps.push_back(record);
    if (config.record_genealogy) {
      const auto lw = result.particles.log_weights();
      const auto anc = result.particles.ancestors();
      for (std::size_t j = 0; j < n; ++j) {
        result.genealogy.push_back({i, record.t, j, anc[j], lw[j], record.ess_before, record.resampled});
      }
    }
    if (observer) {
      observer(i, result.particles);
    }
  }
  return result;
}

FilterResult run_sis(const LatentSdeModel& model, const ObservationSequence& observations, FilterConfig config,
                     std::uint64_t seed, ThreadPool* pool) {
  config.policy.enabled = false;
  return run_filter(model, observations, config, seed, pool);
}

}  // namespace ctpf
