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

#ifndef CTPF_MLP_HPP
#define CTPF_MLP_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctpf/latent_model.hpp"

namespace ctpf {

/// Fully connected layer, y = W x + b with W stored row-major.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Fixed-weight drift network (z, t) -> R^d: tanh on hidden layers, identity
/// on the output layer.
class MlpDrift {
 public:
  /// Throws ArgumentError on inconsistent shapes, non-finite weights, or an
  /// output width different from inputs - 1.
  explicit MlpDrift(std::vector<DenseLayer> layers);

  /// Layer widths, input first: [d + 1, hidden..., d].
  std::vector<std::size_t> widths() const;
  std::size_t state_dim() const noexcept { return layers_.back().outputs; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  void forward(std::span<const double> z, double t, std::span<double> out) const;

  /// {widths: [...], layers: [{W: [[...]], b: [...]}]}.
  static MlpDrift from_json(const nlohmann::json& json);
  nlohmann::json to_json() const;

  /// Gaussian weights with standard deviation scale / sqrt(fan_in), zero
  /// biases. For smoke tests only.
  static MlpDrift random(std::span<const std::size_t> widths, std::uint64_t seed, double scale = 1.0);

 private:
  std::vector<DenseLayer> layers_;
  std::size_t max_width_ = 0;
};

std::vector<double> mlp_forward(const MlpDrift& drift, std::span<const double> z, double t);

MlpDrift load_mlp_weights(const std::filesystem::path& path);

/// Latent model with an MLP prior drift, a constant diagonal diffusion and a
/// Gaussian decoder reading the first obs_dim latent coordinates.
class MlpLatentModel final : public LatentSdeModel {
 public:
  MlpLatentModel(MlpDrift drift, std::vector<double> diffusion, std::size_t obs_dim, double emission_std,
                 double guidance_gain, std::vector<double> initial_state = {});

  std::size_t state_dim() const override { return drift_->state_dim(); }
  std::size_t obs_dim() const override { return obs_dim_; }
  const SdeFunctions& prior() const override { return prior_; }
  std::vector<double> initial_state() const override { return initial_state_; }
  VectorField posterior_drift(const ProposalContext& context) const override;
  double decoder_loglik(std::span<const double> z, std::span<const double> x,
                        const ObservationHistory& history) const override;
  void decoder_mean(std::span<const double> z, std::span<double> out) const override;

 private:
  std::shared_ptr<const MlpDrift> drift_;
  SdeFunctions prior_;
  std::size_t obs_dim_;
  double emission_std_;
  double guidance_gain_;
  std::vector<double> initial_state_;
};

}  // namespace ctpf

#endif  // CTPF_MLP_HPP
