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

#include "ctpf/latent_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "ctpf/errors.hpp"

namespace ctpf {

double diagonal_gaussian_logpdf(std::span<const double> x, std::span<const double> mean, double std) {
  if (x.size() != mean.size()) {
    throw ArgumentError("gaussian logpdf dimension mismatch");
  }
  const double var = std * std;
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = x[k] - mean[k];
    sq += r * r;
  }
  const double out = -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi * var) - 0.5 * sq / var;
  if (std::isnan(out)) {
    throw ArgumentError("non-finite input to decoder likelihood");
  }
  return out;
}

namespace {

double clamp_correction(double correction, double sigma, double u_bound) {
  const double limit = u_bound * std::abs(sigma);
  return std::clamp(correction, -limit, limit);
}

}  // namespace

VectorField identity_guided_drift(const SdeFunctions& prior, std::vector<double> target, double t_end,
                                  double noise_var, double gain, double u_bound) {
  const std::size_t d = prior.dim;
  if (target.size() > d) {
    throw ArgumentError("guide target has more coordinates than the latent state");
  }
  return [drift = prior.drift, diffusion = prior.diffusion, target = std::move(target), t_end, noise_var, gain,
          u_bound, d](std::span<const double> z, double t, std::span<double> out) {
    drift(z, t, out);
    // Up to 8 coordinates on the stack; the built-in models have at most 4.
    std::array<double, 8> sigma_buffer{};
    std::vector<double> heap;
    std::span<double> sigma;
    if (d <= sigma_buffer.size()) {
      sigma = std::span<double>(sigma_buffer.data(), d);
    } else {
      heap.resize(d);
      sigma = heap;
    }
    diffusion(z, t, sigma);
    const double tau = std::max(t_end - t, 0.0);
    for (std::size_t k = 0; k < target.size(); ++k) {
      const double s2 = sigma[k] * sigma[k];
      const double predicted = z[k] + out[k] * tau;
      const double correction = gain * s2 * (target[k] - predicted) / (s2 * tau + noise_var);
      out[k] += clamp_correction(correction, sigma[k], u_bound);
    }
  };
}

OracleModel::OracleModel(ProcessSpec process, double emission_std, double guidance_gain)
    : process_(std::move(process)),
      prior_(process_.sde()),
      emission_std_(emission_std),
      guidance_gain_(guidance_gain) {
  if (!(std::isfinite(emission_std) && emission_std > 0.0)) {
    throw ArgumentError("emission_std must be finite and positive");
  }
  if (!(std::isfinite(guidance_gain) && guidance_gain >= 0.0)) {
    throw ArgumentError("guidance_gain must be finite and non-negative");
  }
  if (process_.kind() == ProcessKind::kCar4) {
    car4_transition_ = std::make_shared<Car4ObservableTransition>(std::get<Car4Params>(process_.params()));
  }
}

VectorField OracleModel::posterior_drift(const ProposalContext& context) const {
  const std::vector<double>* target = context.target();
  if (guidance_gain_ == 0.0 || target == nullptr) {
    return prior_.drift;
  }
  const double noise_var = emission_std_ * emission_std_;
  if (process_.kind() != ProcessKind::kCar4) {
    return identity_guided_drift(prior_, *target, context.t_end, noise_var, guidance_gain_);
  }
  // CAR4 is observed through Y[0] but driven through e: the correction is
  // e (row(tau) . e) (x - row(tau) . y) / (var(tau) + noise_var).
  const auto& e = std::get<Car4Params>(process_.params()).e;
  return [drift = prior_.drift, transition = car4_transition_, e, x = (*target)[0], t_end = context.t_end, noise_var,
          gain = guidance_gain_](std::span<const double> y, double t, std::span<double> out) {
    drift(y, t, out);
    const double tau = std::clamp(t_end - t, 0.0, Car4ObservableTransition::max_horizon());
    const Vector4 row = transition->row(tau);
    double sensitivity = 0.0;
    double predicted = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      sensitivity += row[c] * e[c];
      predicted += row[c] * y[c];
    }
    const double pull = gain * sensitivity * (x - predicted) / (transition->variance(tau) + noise_var);
    for (std::size_t c = 0; c < 4; ++c) {
      out[c] += clamp_correction(e[c] * pull, e[c], kGuideUBound);
    }
  };
}

double OracleModel::decoder_loglik(std::span<const double> z, std::span<const double> x,
                                   const ObservationHistory&) const {
  std::array<double, 4> mean{};
  const std::span<double> m(mean.data(), obs_dim());
  process_.observe(z, m);
  return diagonal_gaussian_logpdf(x, m, emission_std_);
}

void OracleModel::decoder_mean(std::span<const double> z, std::span<double> out) const { process_.observe(z, out); }

std::unique_ptr<LatentSdeModel> oracle_model(const ProcessSpec& process, double emission_std, double guidance_gain) {
  return std::make_unique<OracleModel>(process, emission_std, guidance_gain);
}

}  // namespace ctpf
