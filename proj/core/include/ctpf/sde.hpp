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

#ifndef CTPF_SDE_HPP
#define CTPF_SDE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ctpf/wiener.hpp"

namespace ctpf {

/// f(state, t) -> out. Used for drifts and for (diagonal) diffusions.
/// Implementations must be pure and write every entry of `out`.
using VectorField = std::function<void(std::span<const double> state, double t, std::span<double> out)>;

/// dZ = drift(Z, t) dt + diag(diffusion(Z, t)) dW.
struct SdeFunctions {
  std::size_t dim = 0;
  VectorField drift;
  VectorField diffusion;
};

struct SolverOptions {
  /// Lower bound on |sigma| used when solving sigma * u = posterior - prior.
  double sigma_floor = 1e-6;
  /// Per-component bound on |u|; exceeding it raises ProposalExplosionError.
  double u_max = 1e4;
  /// Store (t, state) after every substep.
  bool record_path = false;
};

struct PathPoint {
  double t = 0.0;
  std::vector<double> state;
};

struct AugmentedResult {
  std::vector<double> terminal_state;
  std::vector<PathPoint> path;  // empty unless SolverOptions::record_path
  double log_m = 0.0;           // log Radon-Nikodym weight of the segment
};

/// Explicit Euler-Maruyama over one segment starting at (t0, z0):
/// z <- z + mu(z, t) h + sigma(z, t) * dW per substep.
AugmentedResult euler_maruyama(const SdeFunctions& sde, std::span<const double> z0, double t0,
                               const WienerSegment& segment, const SolverOptions& options = {});

/// Integrates the state under `posterior_drift` (sharing the prior's
/// diffusion) and co-integrates the log importance weight
///
///   log M = -sum_k ( 0.5 |u_k|^2 h_k + u_k . dW_k ),
///   sigma(z, t) u = posterior_drift(z, t) - prior.drift(z, t),
///
/// with every quantity evaluated at the left end of the substep. Passing the
/// prior drift itself as the posterior reproduces euler_maruyama bit for bit.
AugmentedResult augmented_solve(const SdeFunctions& prior, const VectorField& posterior_drift,
                                std::span<const double> z0, double t0, const WienerSegment& segment,
                                const SolverOptions& options = {});

}  // namespace ctpf

#endif  // CTPF_SDE_HPP
