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

#include "ctpf/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "ctpf/errors.hpp"
#include "ctpf/random.hpp"

namespace ctpf {

using nlohmann::json;

MlpDrift::MlpDrift(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw ArgumentError("MLP needs at least one layer");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.inputs == 0 || layer.outputs == 0 || layer.weights.size() != layer.inputs * layer.outputs ||
        layer.bias.size() != layer.outputs) {
      throw ArgumentError("MLP layer " + std::to_string(l) + " has inconsistent shape");
    }
    if (l > 0 && layer.inputs != layers_[l - 1].outputs) {
      throw ArgumentError("MLP layer " + std::to_string(l) + " input width does not match previous output");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw ArgumentError("MLP layer " + std::to_string(l) + " has non-finite weights");
    }
    max_width_ = std::max({max_width_, layer.inputs, layer.outputs});
  }
  if (layers_.front().inputs != layers_.back().outputs + 1) {
    throw ArgumentError("MLP drift input must be (z, t): input width must equal output width + 1");
  }
}

std::vector<std::size_t> MlpDrift::widths() const {
  std::vector<std::size_t> out{layers_.front().inputs};
  for (const auto& layer : layers_) out.push_back(layer.outputs);
  return out;
}

void MlpDrift::forward(std::span<const double> z, double t, std::span<double> out) const {
  const std::size_t d = state_dim();
  if (z.size() != d || out.size() != d) {
    throw ArgumentError("MLP input has dimension " + std::to_string(z.size()) + ", expected " + std::to_string(d));
  }
  thread_local std::vector<double> current;
  thread_local std::vector<double> next;
  current.assign(z.begin(), z.end());
  current.push_back(t);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      const double* row = layer.weights.data() + r * layer.inputs;
      double acc = 0.0;
      for (std::size_t c = 0; c < layer.inputs; ++c) acc += row[c] * current[c];
      next[r] += acc;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : next) v = std::tanh(v);
    }
    current.swap(next);
  }
  std::copy(current.begin(), current.end(), out.begin());
}

MlpDrift MlpDrift::from_json(const json& j) {
  try {
    std::vector<DenseLayer> layers;
    for (const json& lj : j.at("layers")) {
      const auto w = lj.at("W").get<std::vector<std::vector<double>>>();
      DenseLayer layer;
      layer.outputs = w.size();
      layer.inputs = w.empty() ? 0 : w.front().size();
      for (const auto& row : w) {
        if (row.size() != layer.inputs) {
          throw ArgumentError("ragged MLP weight matrix");
        }
        layer.weights.insert(layer.weights.end(), row.begin(), row.end());
      }
      layer.bias = lj.at("b").get<std::vector<double>>();
      layers.push_back(std::move(layer));
    }
    MlpDrift out(std::move(layers));
    if (j.contains("widths") && j.at("widths").get<std::vector<std::size_t>>() != out.widths()) {
      throw ArgumentError("MLP 'widths' does not match the layer shapes");
    }
    return out;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed MLP weights: ") + e.what());
  }
}

json MlpDrift::to_json() const {
  json layers = json::array();
  for (const auto& layer : layers_) {
    std::vector<std::vector<double>> w(layer.outputs);
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      w[r].assign(layer.weights.begin() + static_cast<std::ptrdiff_t>(r * layer.inputs),
                  layer.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * layer.inputs));
    }
    layers.push_back({{"W", w}, {"b", layer.bias}});
  }
  return {{"widths", widths()}, {"layers", layers}};
}

MlpDrift MlpDrift::random(std::span<const std::size_t> widths, std::uint64_t seed, double scale) {
  if (widths.size() < 2) {
    throw ArgumentError("MLP needs at least input and output widths");
  }
  auto rng = make_stream(seed, StreamDomain::kSelfTest, 0x4d4c50);
  std::normal_distribution<double> normal;
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer{widths[l], widths[l + 1], std::vector<double>(widths[l] * widths[l + 1]),
                     std::vector<double>(widths[l + 1], 0.0)};
    const double s = scale / std::sqrt(static_cast<double>(widths[l]));
    for (double& w : layer.weights) w = s * normal(rng);
    layers.push_back(std::move(layer));
  }
  return MlpDrift(std::move(layers));
}

std::vector<double> mlp_forward(const MlpDrift& drift, std::span<const double> z, double t) {
  std::vector<double> out(drift.state_dim());
  drift.forward(z, t, out);
  return out;
}

MlpDrift load_mlp_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open MLP weights '" + path.string() + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse MLP weights '" + path.string() + "': " + e.what());
  }
  return MlpDrift::from_json(j);
}

MlpLatentModel::MlpLatentModel(MlpDrift drift, std::vector<double> diffusion, std::size_t obs_dim,
                               double emission_std, double guidance_gain, std::vector<double> initial_state)
    : drift_(std::make_shared<const MlpDrift>(std::move(drift))),
      obs_dim_(obs_dim),
      emission_std_(emission_std),
      guidance_gain_(guidance_gain),
      initial_state_(std::move(initial_state)) {
  const std::size_t d = drift_->state_dim();
  if (diffusion.size() == 1 && d > 1) {
    diffusion.assign(d, diffusion.front());
  }
  if (diffusion.size() != d) {
    throw ArgumentError("MLP model diffusion must have one entry per latent coordinate");
  }
  if (obs_dim_ == 0 || obs_dim_ > d) {
    throw ArgumentError("MLP model observation dimension must be in [1, state_dim]");
  }
  if (!(emission_std > 0.0) || !(guidance_gain >= 0.0)) {
    throw ArgumentError("MLP model needs emission_std > 0 and guidance_gain >= 0");
  }
  if (initial_state_.empty()) {
    initial_state_.assign(d, 0.0);
  }
  if (initial_state_.size() != d) {
    throw ArgumentError("MLP model initial state has the wrong dimension");
  }
  prior_.dim = d;
  prior_.drift = [net = drift_](std::span<const double> z, double t, std::span<double> out) { net->forward(z, t, out); };
  prior_.diffusion = [diffusion](std::span<const double>, double, std::span<double> out) {
    std::copy(diffusion.begin(), diffusion.end(), out.begin());
  };
}

VectorField MlpLatentModel::posterior_drift(const ProposalContext& context) const {
  const std::vector<double>* target = context.target();
  if (guidance_gain_ == 0.0 || target == nullptr) {
    return prior_.drift;
  }
  return identity_guided_drift(prior_, *target, context.t_end, emission_std_ * emission_std_, guidance_gain_);
}

double MlpLatentModel::decoder_loglik(std::span<const double> z, std::span<const double> x,
                                      const ObservationHistory&) const {
  return diagonal_gaussian_logpdf(x, z.first(obs_dim_), emission_std_);
}

void MlpLatentModel::decoder_mean(std::span<const double> z, std::span<double> out) const {
  std::copy_n(z.begin(), obs_dim_, out.begin());
}

}  // namespace ctpf
