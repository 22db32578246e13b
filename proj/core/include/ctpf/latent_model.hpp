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

#ifndef CTPF_LATENT_MODEL_HPP
#define CTPF_LATENT_MODEL_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ctpf/process.hpp"
#include "ctpf/sde.hpp"

namespace ctpf {

/// What a posterior-drift generator may condition on for one interval
/// (t_start, t_end].
struct ProposalContext {
  double t_start = 0.0;
  double t_end = 0.0;
  std::span<const double> z_start;  // latent state at t_start
  const ObservationSequence* observations = nullptr;
  std::size_t known = 0;  // observations [0, known) precede the interval
  /// Whether observation `known` (the one at t_end) may be looked at.
  bool use_target = true;

  /// The interval's target observation, or nullptr when unavailable.
  const std::vector<double>* target() const {
    if (!use_target || observations == nullptr || known >= observations->size()) {
      return nullptr;
    }
    return &observations->values[known];
  }
};

/// Observations that precede the one being scored.
struct ObservationHistory {
  const ObservationSequence* observations = nullptr;
  std::size_t known = 0;
};

/// A latent SDE: prior drift and shared diagonal diffusion, a generator of
/// posterior drifts (one per particle and interval), and a decoder.
///
/// The posterior is described by a drift only, so prior and posterior share
/// the diffusion by construction. Implementations are immutable and safe for
/// concurrent use.
class LatentSdeModel {
 public:
  virtual ~LatentSdeModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t obs_dim() const = 0;

  /// Prior drift and the shared diffusion.
  virtual const SdeFunctions& prior() const = 0;

  /// Latent state at t = 0.
  virtual std::vector<double> initial_state() const = 0;

  /// Posterior drift for one particle over one interval.
  virtual VectorField posterior_drift(const ProposalContext& context) const = 0;

  /// log p(x | z, earlier observations).
  virtual double decoder_loglik(std::span<const double> z, std::span<const double> x,
                                const ObservationHistory& history) const = 0;

  /// E[X | z].
  virtual void decoder_mean(std::span<const double> z, std::span<double> out) const = 0;
};

/// log N(x; mean, std^2 I).
double diagonal_gaussian_logpdf(std::span<const double> x, std::span<const double> mean, double std);

/// Default bound on |u| used when clamping guided drifts; half of the
/// solver's default u_max.
inline constexpr double kGuideUBound = 5e3;

/// Guide for models observed through the first m latent coordinates with
/// Gaussian noise of variance `noise_var`: per coordinate k < m,
///
///   mu_post = mu + gain sigma^2 (x - z - mu tau) / (sigma^2 tau + noise_var),
///
/// tau = t_end - t, with the correction clamped to |u| <= u_bound. This is the
/// h-transform of a locally frozen linear-Gaussian transition.
VectorField identity_guided_drift(const SdeFunctions& prior, std::vector<double> target, double t_end,
                                  double noise_var, double gain, double u_bound = kGuideUBound);

/// A latent model whose latent process is the data process itself, decoded
/// with Gaussian noise of standard deviation `emission_std` around the
/// noise-free observable. `guidance_gain` scales a guided (bridge-like)
/// proposal toward the next observation; 0 gives the bootstrap proposal.
class OracleModel final : public LatentSdeModel {
 public:
  OracleModel(ProcessSpec process, double emission_std, double guidance_gain);

  std::size_t state_dim() const override { return process_.state_dim(); }
  std::size_t obs_dim() const override { return process_.obs_dim(); }
  const SdeFunctions& prior() const override { return prior_; }
  std::vector<double> initial_state() const override { return process_.initial_state(); }
  VectorField posterior_drift(const ProposalContext& context) const override;
  double decoder_loglik(std::span<const double> z, std::span<const double> x,
                        const ObservationHistory& history) const override;
  void decoder_mean(std::span<const double> z, std::span<double> out) const override;

  const ProcessSpec& process() const noexcept { return process_; }
  double emission_std() const noexcept { return emission_std_; }
  double guidance_gain() const noexcept { return guidance_gain_; }

 private:
  ProcessSpec process_;
  SdeFunctions prior_;
  double emission_std_;
  double guidance_gain_;
  std::shared_ptr<const Car4ObservableTransition> car4_transition_;
};

std::unique_ptr<LatentSdeModel> oracle_model(const ProcessSpec& process, double emission_std, double guidance_gain);

}  // namespace ctpf

#endif  // CTPF_LATENT_MODEL_HPP
