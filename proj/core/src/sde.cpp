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

#include "ctpf/sde.hpp"

#include <cmath>

#include "ctpf/errors.hpp"

namespace ctpf {

namespace {

void check_dimensions(const SdeFunctions& sde, std::span<const double> z0, const WienerSegment& segment) {
  if (sde.dim == 0 || z0.size() != sde.dim || segment.dim() != sde.dim) {
    throw ArgumentError("dimension mismatch between SDE (" + std::to_string(sde.dim) + "), initial state (" +
                        std::to_string(z0.size()) + ") and Wiener segment (" + std::to_string(segment.dim()) + ")");
  }
  if (!sde.drift || !sde.diffusion) {
    throw ArgumentError("SDE drift and diffusion must be set");
  }
}

// posterior == nullptr integrates the prior and leaves log_m at zero.
AugmentedResult integrate(const SdeFunctions& prior, const VectorField* posterior, std::span<const double> z0,
                          double t0, const WienerSegment& segment, const SolverOptions& options) {
  check_dimensions(prior, z0, segment);
  const std::size_t d = prior.dim;

  AugmentedResult result;
  result.terminal_state.assign(z0.begin(), z0.end());
  std::vector<double> scratch(3 * d);
  std::span<double> prior_drift(scratch.data(), d);
  std::span<double> post_drift(scratch.data() + d, d);
  std::span<double> sigma(scratch.data() + 2 * d, d);
  std::span<double> z(result.terminal_state);

  if (options.record_path) {
    result.path.reserve(segment.substeps() + 1);
    result.path.push_back({t0, result.terminal_state});
  }

  double t = t0;
  double log_m = 0.0;
  for (std::size_t k = 0; k < segment.substeps(); ++k) {
    const double h = segment.substep_length(k);
    const auto dw = segment.increment(k);
    prior.drift(z, t, prior_drift);
    prior.diffusion(z, t, sigma);
    if (posterior != nullptr) {
      (*posterior)(z, t, post_drift);
      double step_log_m = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double s = sigma[c];
        if (std::abs(s) < options.sigma_floor) {
          s = std::signbit(s) ? -options.sigma_floor : options.sigma_floor;
        }
        const double u = (post_drift[c] - prior_drift[c]) / s;
        if (!(std::abs(u) <= options.u_max)) {
          throw ProposalExplosionError(t, c, u);
        }
        step_log_m += 0.5 * u * u * h + u * dw[c];
      }
      log_m -= step_log_m;
      for (std::size_t c = 0; c < d; ++c) {
        z[c] += post_drift[c] * h + sigma[c] * dw[c];
      }
    } else {
      for (std::size_t c = 0; c < d; ++c) {
        z[c] += prior_drift[c] * h + sigma[c] * dw[c];
      }
    }
    t = k + 1 < segment.substeps() ? t + h : t0 + segment.duration();
    for (std::size_t c = 0; c < d; ++c) {
      if (!std::isfinite(z[c])) {
        throw DivergenceError(t);
      }
    }
    if (options.record_path) {
      result.path.push_back({t, result.terminal_state});
    }
  }
  if (!std::isfinite(log_m)) {
    throw DivergenceError(t);
  }
  result.log_m = log_m;
  return result;
}

}  // namespace

AugmentedResult euler_maruyama(const SdeFunctions& sde, std::span<const double> z0, double t0,
                               const WienerSegment& segment, const SolverOptions& options) {
  return integrate(sde, nullptr, z0, t0, segment, options);
}

AugmentedResult augmented_solve(const SdeFunctions& prior, const VectorField& posterior_drift,
                                std::span<const double> z0, double t0, const WienerSegment& segment,
                                const SolverOptions& options) {
  if (!posterior_drift) {
    throw ArgumentError("posterior drift must be set");
  }
  return integrate(prior, &posterior_drift, z0, t0, segment, options);
}

}  // namespace ctpf
