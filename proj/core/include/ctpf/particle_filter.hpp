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

#ifndef CTPF_PARTICLE_FILTER_HPP
#define CTPF_PARTICLE_FILTER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ctpf/latent_model.hpp"
#include "ctpf/process.hpp"
#include "ctpf/resampling.hpp"
#include "ctpf/sde.hpp"
#include "ctpf/thread_pool.hpp"
#include "ctpf/wiener.hpp"

namespace ctpf {

/// Resample after the weight update when ESS < threshold_fraction * N.
struct ResamplePolicy {
  double threshold_fraction = 0.5;
  ResampleScheme scheme = ResampleScheme::kSystematic;
  bool enabled = true;

  void validate() const;
  bool should_resample(double ess, std::size_t particles) const {
    return enabled && ess < threshold_fraction * static_cast<double>(particles);
  }
};

/// Persistent list of the Wiener segments a particle was built from, newest
/// first. Particles copied by resampling share their history.
struct SegmentHistory {
  std::shared_ptr<const WienerSegment> segment;
  std::shared_ptr<const SegmentHistory> previous;
  std::size_t length = 1;
};
using SegmentHistoryPtr = std::shared_ptr<const SegmentHistory>;

/// Segments of a history in time order.
std::vector<std::shared_ptr<const WienerSegment>> unroll(const SegmentHistoryPtr& history);

/// Particles stored as structure of arrays: terminal latent states, log
/// weights, the ancestor each particle was copied from at the last step, and
/// (optionally) the segment history.
class ParticleSet {
 public:
  ParticleSet() = default;
  ParticleSet(std::size_t count, std::span<const double> initial_state);

  std::size_t size() const noexcept { return log_weights_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> state(std::size_t j) const { return {states_.data() + j * dim_, dim_}; }
  std::span<double> state(std::size_t j) { return {states_.data() + j * dim_, dim_}; }

  std::span<const double> log_weights() const noexcept { return log_weights_; }
  std::span<double> log_weights() noexcept { return log_weights_; }

  std::span<const std::size_t> ancestors() const noexcept { return ancestors_; }
  std::span<const SegmentHistoryPtr> histories() const noexcept { return histories_; }

  /// Normalized linear weights.
  std::vector<double> weights() const;

 private:
  friend struct ParticleSetAccess;

  std::size_t dim_ = 0;
  std::vector<double> states_;
  std::vector<double> log_weights_;
  std::vector<std::size_t> ancestors_;
  std::vector<SegmentHistoryPtr> histories_;
};

/// Source of Wiener segments; overrides the default counter-based streams
/// (used to hand-set segments in tests).
using SegmentSource =
    std::function<WienerSegment(std::size_t step, std::size_t particle, double duration, double dt, std::size_t dim)>;

struct FilterConfig {
  std::size_t particles = 125;
  double dt = 1e-3;
  ResamplePolicy policy;
  SolverOptions solver;
  /// Retain every particle's Wiener segments.
  bool keep_segments = false;
  /// Fill FilterResult::genealogy.
  bool record_genealogy = false;
  SegmentSource segment_source;

  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  double incremental_log_lik = 0.0;
  double ess_before = 0.0;  // after the weight update, before resampling
  bool resampled = false;
};

/// One particle at the end of one step (after resampling, if any).
struct GenealogyRow {
  std::size_t step = 0;
  double t = 0.0;
  std::size_t particle = 0;
  std::size_t ancestor = 0;
  double log_weight = 0.0;
  double ess = 0.0;
  bool resampled = false;
};

struct FilterResult {
  double total_log_likelihood = 0.0;
  std::vector<StepRecord> steps;
  ParticleSet particles;
  std::uint64_t seed = 0;
  /// 32-bit random words consumed (propagation plus resampling).
  std::uint64_t rng_draws = 0;
  std::vector<GenealogyRow> genealogy;

  double nll_per_observation() const { return -total_log_likelihood / static_cast<double>(steps.size()); }
};

struct StepOutcome {
  double incremental_log_lik = 0.0;
  std::uint64_t rng_draws = 0;
};

/// Propagates every particle over (t_{index-1}, t_index] and folds in the
/// observation at t_index:
///
///   log w~_j = log w_j + log p(x | z_j) + log M_j,
///   incremental log-likelihood = logsumexp_j log w~_j,
///
/// then renormalizes. Input weights must be normalized. Particle j draws its
/// segment from the (seed, step, j) propagation stream.
StepOutcome pf_step(ParticleSet& particles, const LatentSdeModel& model, const ObservationSequence& observations,
                    std::size_t index, const FilterConfig& config, std::uint64_t seed, ThreadPool* pool = nullptr);

/// Replaces the particles by `particles.size()` draws from their weights and
/// resets every log weight to -ln N. Returns the random words consumed.
std::uint64_t resample(ParticleSet& particles, ResampleScheme scheme, Philox4x32& rng);

/// Called after every step with the step index and the particle set (after
/// resampling).
using StepObserver = std::function<void(std::size_t index, const ParticleSet& particles)>;

/// Continuous-time particle filter over a whole sequence. Resampling draws
/// come from a per-step stream separate from propagation, so disabling it
/// leaves every propagated path unchanged.
FilterResult run_filter(const LatentSdeModel& model, const ObservationSequence& observations,
                        const FilterConfig& config, std::uint64_t seed, ThreadPool* pool = nullptr,
                        const StepObserver& observer = {});

/// Sequential importance sampling (the IWAE estimate): run_filter with
/// resampling disabled.
FilterResult run_sis(const LatentSdeModel& model, const ObservationSequence& observations, FilterConfig config,
                     std::uint64_t seed, ThreadPool* pool = nullptr);

}  // namespace ctpf

#endif  // CTPF_PARTICLE_FILTER_HPP
