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

#ifndef CTPF_PROCESS_HPP
#define CTPF_PROCESS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctpf/random.hpp"
#include "ctpf/sde.hpp"
#include "ctpf/time_grid.hpp"
#include "ctpf/wiener.hpp"

namespace ctpf {

enum class ProcessKind { kGbm, kLsde, kCar4, kSlc };

std::string_view to_string(ProcessKind kind);
/// Accepts "gbm", "lsde", "car", "car4", "slc" (case-insensitive).
ProcessKind parse_process_kind(std::string_view name);

/// dX = mu X dt + sigma X dW.
struct GbmParams {
  double mu = 0.2;
  double sigma = 0.1;
  double x0 = 1.0;
};

/// dX = (a(t) X + b(t)) dt + s(t) dW with
/// a(t) = a_sin sin t + a_const, b(t) = b_cos cos t + b_const,
/// s(t) = sigma_logistic / (1 + e^-t) + sigma_const.
struct LsdeParams {
  double a_sin = 0.5;
  double a_const = 0.0;
  double b_cos = 0.5;
  double b_const = 0.0;
  double sigma_logistic = 0.2;
  double sigma_const = 0.0;
  double x0 = 0.0;

  double a(double t) const;
  double b(double t) const;
  double sigma(double t) const;
};

using Vector4 = std::array<double, 4>;
using Matrix4 = std::array<double, 16>;  // row-major

/// dY = A Y dt + e dW, X = Y[0].
struct Car4Params {
  Matrix4 a = {0.0, 1.0, 0.0, 0.0,  //
               0.0, 0.0, 1.0, 0.0,  //
               0.0, 0.0, 0.0, 1.0,  //
               0.002, 0.005, -0.003, -0.002};
  Vector4 e = {0.0, 0.0, 0.0, 1.0};
  Vector4 y0 = {0.0, 0.0, 0.0, 0.0};
};

/// Stochastic Lorenz system with independent noise per coordinate.
struct SlcParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  std::array<double, 3> noise = {0.1, 0.28, 0.3};
  std::array<double, 3> x0 = {1.0, 1.0, 1.0};
};

/// One of the four benchmark processes with its parameters.
class ProcessSpec {
 public:
  using Params = std::variant<GbmParams, LsdeParams, Car4Params, SlcParams>;

  static ProcessSpec gbm(GbmParams params = {});
  static ProcessSpec lsde(LsdeParams params = {});
  static ProcessSpec car4(Car4Params params = {});
  static ProcessSpec slc(SlcParams params = {});
  /// Default parameters for `kind`.
  static ProcessSpec make(ProcessKind kind);

  ProcessKind kind() const noexcept { return kind_; }
  const Params& params() const noexcept { return params_; }
  std::size_t state_dim() const noexcept;
  std::size_t obs_dim() const noexcept;
  /// 30 for GBM/LSDE/CAR4, 2 for SLC.
  double default_horizon() const noexcept;

  SdeFunctions sde() const;
  std::vector<double> initial_state() const;
  /// Noise-free observable: identity, or the first coordinate for CAR4.
  void observe(std::span<const double> state, std::span<double> out) const;

 private:
  ProcessSpec(ProcessKind kind, Params params) : kind_(kind), params_(std::move(params)) {}

  ProcessKind kind_;
  Params params_;
};

/// Observations of one sequence: grid points and m-dimensional values.
struct ObservationSequence {
  TimeGrid grid;
  std::vector<std::vector<double>> values;

  std::size_t size() const noexcept { return grid.size(); }
  /// Sequence made of the first `count` observations.
  ObservationSequence prefix(std::size_t count) const;
  /// Throws ArgumentError unless sizes agree and values are finite.
  void validate(std::size_t obs_dim) const;

  friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;
};

/// Gaps are i.i.d. Exponential(intensity), accumulated while <= horizon.
/// Empty draws are rejected and redrawn, so the grid has at least one point.
TimeGrid sample_observation_times(double intensity, double horizon, Philox4x32& rng);

/// Reads out a process path driven by the given Wiener segments, one per
/// grid interval (segment i covers (t_{i-1}, t_i]).
ObservationSequence simulate_with_segments(const ProcessSpec& spec, const TimeGrid& grid,
                                           std::span<const WienerSegment> segments);

/// Euler-Maruyama simulation at step dt, read out (and projected) at the
/// grid points. Intervals shorter than dt are integrated in one substep.
ObservationSequence simulate(const ProcessSpec& spec, const TimeGrid& grid, double dt, Philox4x32& rng);

/// Log density of the GBM transition x_prev -> x_next over dt:
/// ln x_next ~ N(ln x_prev + (mu - sigma^2 / 2) dt, sigma^2 dt).
double gbm_exact_transition_logpdf(double x_prev, double x_next, double dt, double mu, double sigma);

/// Exact log-likelihood of a GBM observation sequence starting from x0 at 0.
double gbm_exact_sequence_loglik(const ObservationSequence& sequence, const GbmParams& params);

struct ScalarMoments {
  double mean = 0.0;
  double var = 0.0;
};

/// Mean and variance of the LSDE at t1 given X(t0) = x0, from the moment ODEs
/// m' = a m + b, v' = 2 a v + s^2 integrated with RK4 at step quad_dt.
ScalarMoments lsde_exact_moments(const LsdeParams& params, double x0, double t0, double t1, double quad_dt);

struct Car4Moments {
  Vector4 mean{};
  Matrix4 cov{};
};

/// Mean and covariance of the CAR4 state after dt given Y(0) = y0, from
/// m' = A m, C' = A C + C A^T + e e^T integrated with RK4 at step quad_dt.
Car4Moments car4_exact_moments(const Car4Params& params, const Vector4& y0, double dt, double quad_dt);

/// Projection of a linear SDE transition onto its observable X = Y[0]:
/// row(tau) = [1,0,0,0] exp(A tau) and var(tau) = Var(X(tau) | Y(0)),
/// evaluated from a truncated power series. Valid for tau <= max_horizon().
class Car4ObservableTransition {
 public:
  explicit Car4ObservableTransition(const Car4Params& params);

  Vector4 row(double tau) const;
  double variance(double tau) const;
  static constexpr double max_horizon() { return 20.0; }

 private:
  static constexpr std::size_t kTerms = 64;
  std::array<Vector4, kTerms> row_coefficients_{};  // [1,0,0,0] A^k / k!
  std::vector<double> variance_coefficients_;       // integral of (row(s) e)^2 ds
};

}  // namespace ctpf

#endif  // CTPF_PROCESS_HPP
