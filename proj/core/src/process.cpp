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

#include "ctpf/process.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ctpf/errors.hpp"

namespace ctpf {

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::kGbm:
      return "gbm";
    case ProcessKind::kLsde:
      return "lsde";
    case ProcessKind::kCar4:
      return "car4";
    case ProcessKind::kSlc:
      return "slc";
  }
  return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "gbm") return ProcessKind::kGbm;
  if (lower == "lsde") return ProcessKind::kLsde;
  if (lower == "car" || lower == "car4") return ProcessKind::kCar4;
  if (lower == "slc") return ProcessKind::kSlc;
  throw ArgumentError("unknown process kind '" + std::string(name) + "' (expected gbm, lsde, car4 or slc)");
}

double LsdeParams::a(double t) const { return a_sin * std::sin(t) + a_const; }
double LsdeParams::b(double t) const { return b_cos * std::cos(t) + b_const; }
double LsdeParams::sigma(double t) const { return sigma_logistic / (1.0 + std::exp(-t)) + sigma_const; }

ProcessSpec ProcessSpec::gbm(GbmParams params) {
  if (!(params.sigma > 0.0) || !(params.x0 > 0.0)) {
    throw ArgumentError("GBM needs sigma > 0 and x0 > 0");
  }
  return ProcessSpec(ProcessKind::kGbm, params);
}

ProcessSpec ProcessSpec::lsde(LsdeParams params) { return ProcessSpec(ProcessKind::kLsde, params); }
ProcessSpec ProcessSpec::car4(Car4Params params) { return ProcessSpec(ProcessKind::kCar4, params); }
ProcessSpec ProcessSpec::slc(SlcParams params) { return ProcessSpec(ProcessKind::kSlc, params); }

ProcessSpec ProcessSpec::make(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::kGbm:
      return gbm();
    case ProcessKind::kLsde:
      return lsde();
    case ProcessKind::kCar4:
      return car4();
    case ProcessKind::kSlc:
      return slc();
  }
  throw ArgumentError("unknown process kind");
}

std::size_t ProcessSpec::state_dim() const noexcept {
  switch (kind_) {
    case ProcessKind::kCar4:
      return 4;
    case ProcessKind::kSlc:
      return 3;
    default:
      return 1;
  }
}

std::size_t ProcessSpec::obs_dim() const noexcept { return kind_ == ProcessKind::kSlc ? 3 : 1; }

double ProcessSpec::default_horizon() const noexcept { return kind_ == ProcessKind::kSlc ? 2.0 : 30.0; }

SdeFunctions ProcessSpec::sde() const {
  SdeFunctions out;
  out.dim = state_dim();
  switch (kind_) {
    case ProcessKind::kGbm: {
      const auto p = std::get<GbmParams>(params_);
      out.drift = [mu = p.mu](std::span<const double> z, double, std::span<double> f) { f[0] = mu * z[0]; };
      out.diffusion = [sigma = p.sigma](std::span<const double> z, double, std::span<double> g) {
        g[0] = sigma * z[0];
      };
      break;
    }
    case ProcessKind::kLsde: {
      const auto p = std::get<LsdeParams>(params_);
      out.drift = [p](std::span<const double> z, double t, std::span<double> f) { f[0] = p.a(t) * z[0] + p.b(t); };
      out.diffusion = [p](std::span<const double>, double t, std::span<double> g) { g[0] = p.sigma(t); };
      break;
    }
    case ProcessKind::kCar4: {
      const auto p = std::get<Car4Params>(params_);
      out.drift = [a = p.a](std::span<const double> y, double, std::span<double> f) {
        for (std::size_t r = 0; r < 4; ++r) {
          f[r] = a[4 * r] * y[0] + a[4 * r + 1] * y[1] + a[4 * r + 2] * y[2] + a[4 * r + 3] * y[3];
        }
      };
      out.diffusion = [e = p.e](std::span<const double>, double, std::span<double> g) {
        std::copy(e.begin(), e.end(), g.begin());
      };
      break;
    }
    case ProcessKind::kSlc: {
      const auto p = std::get<SlcParams>(params_);
      out.drift = [p](std::span<const double> s, double, std::span<double> f) {
        f[0] = p.sigma * (s[1] - s[0]);
        f[1] = s[0] * (p.rho - s[2]) - s[1];
        f[2] = s[0] * s[1] - p.beta * s[2];
      };
      out.diffusion = [noise = p.noise](std::span<const double>, double, std::span<double> g) {
        std::copy(noise.begin(), noise.end(), g.begin());
      };
      break;
    }
  }
  return out;
}

std::vector<double> ProcessSpec::initial_state() const {
  switch (kind_) {
    case ProcessKind::kGbm:
      return {std::get<GbmParams>(params_).x0};
    case ProcessKind::kLsde:
      return {std::get<LsdeParams>(params_).x0};
    case ProcessKind::kCar4: {
      const auto& y0 = std::get<Car4Params>(params_).y0;
      return {y0.begin(), y0.end()};
    }
    case ProcessKind::kSlc: {
      const auto& x0 = std::get<SlcParams>(params_).x0;
      return {x0.begin(), x0.end()};
    }
  }
  return {};
}

void ProcessSpec::observe(std::span<const double> state, std::span<double> out) const {
  if (kind_ == ProcessKind::kCar4) {
    out[0] = state[0];
    return;
  }
  std::copy(state.begin(), state.end(), out.begin());
}

ObservationSequence ObservationSequence::prefix(std::size_t count) const {
  ObservationSequence out;
  out.grid = grid.prefix(count);
  out.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

void ObservationSequence::validate(std::size_t obs_dim) const {
  if (values.size() != grid.size()) {
    throw ArgumentError("sequence has " + std::to_string(grid.size()) + " times but " +
                        std::to_string(values.size()) + " values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != obs_dim) {
      throw ArgumentError("observation " + std::to_string(i) + " has dimension " + std::to_string(values[i].size()) +
                          ", expected " + std::to_string(obs_dim));
    }
    for (double v : values[i]) {
      if (!std::isfinite(v)) {
        throw ArgumentError("observation " + std::to_string(i) + " is not finite");
      }
    }
  }
}

TimeGrid sample_observation_times(double intensity, double horizon, Philox4x32& rng) {
  if (!(std::isfinite(intensity) && intensity > 0.0)) {
    throw ArgumentError("observation intensity must be finite and positive");
  }
  if (!(std::isfinite(horizon) && horizon > 0.0)) {
    throw ArgumentError("observation horizon must be finite and positive");
  }
  std::exponential_distribution<double> gap(intensity);
  std::vector<double> points;
  while (points.empty()) {
    double t = 0.0;
    while (true) {
      const double next = t + gap(rng);
      if (next > horizon) {
        break;
      }
      // A zero gap (possible in floating point) would break strict ordering.
      if (next > t) {
        points.push_back(next);
      }
      t = next;
    }
  }
  return TimeGrid(std::move(points));
}

ObservationSequence simulate_with_segments(const ProcessSpec& spec, const TimeGrid& grid,
                                           std::span<const WienerSegment> segments) {
  if (segments.size() != grid.size()) {
    throw ArgumentError("need one Wiener segment per grid interval");
  }
  const SdeFunctions sde = spec.sde();
  ObservationSequence out;
  out.grid = grid;
  out.values.reserve(grid.size());
  std::vector<double> state = spec.initial_state();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t0 = grid.interval_start(i);
    if (std::abs(segments[i].duration() - (grid[i] - t0)) > 1e-12 * std::max(1.0, grid[i])) {
      throw ArgumentError("segment " + std::to_string(i) + " does not span its grid interval");
    }
    state = euler_maruyama(sde, state, t0, segments[i]).terminal_state;
    std::vector<double> value(spec.obs_dim());
    spec.observe(state, value);
    out.values.push_back(std::move(value));
  }
  return out;
}

ObservationSequence simulate(const ProcessSpec& spec, const TimeGrid& grid, double dt, Philox4x32& rng) {
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw ArgumentError("simulation dt must be finite and positive");
  }
  std::vector<WienerSegment> segments;
  segments.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    segments.push_back(sample_wiener_segment(grid[i] - grid.interval_start(i), dt, spec.state_dim(), rng));
  }
  return simulate_with_segments(spec, grid, segments);
}

double gbm_exact_transition_logpdf(double x_prev, double x_next, double dt, double mu, double sigma) {
  if (!(x_prev > 0.0) || !(x_next > 0.0)) {
    throw DomainError("GBM transition density needs positive states");
  }
  if (!(dt > 0.0) || !(sigma > 0.0)) {
    throw DomainError("GBM transition density needs dt > 0 and sigma > 0");
  }
  const double var = sigma * sigma * dt;
  const double log_next = std::log(x_next);
  const double residual = log_next - std::log(x_prev) - (mu - 0.5 * sigma * sigma) * dt;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * residual * residual / var - log_next;
}

double gbm_exact_sequence_loglik(const ObservationSequence& sequence, const GbmParams& params) {
  double total = 0.0;
  double previous = params.x0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const double dt = sequence.grid[i] - sequence.grid.interval_start(i);
    const double x = sequence.values[i].at(0);
    total += gbm_exact_transition_logpdf(previous, x, dt, params.mu, params.sigma);
    previous = x;
  }
  return total;
}

namespace {

// Classic RK4 on a state array from t0 to t1, last step absorbing the rest.
template <class State, class Rhs>
State rk4(State y, double t0, double t1, double h, Rhs&& rhs) {
  const std::size_t steps = WienerSegment::substep_count(t1 - t0, h);
  double t = t0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double step = k + 1 < steps ? h : t1 - t;
    State k1 = rhs(t, y);
    State tmp = y;
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * step * k1[i];
    State k2 = rhs(t + 0.5 * step, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * step * k2[i];
    State k3 = rhs(t + 0.5 * step, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + step * k3[i];
    State k4 = rhs(t + step, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    t += step;
  }
  return y;
}

}  // namespace

ScalarMoments lsde_exact_moments(const LsdeParams& params, double x0, double t0, double t1, double quad_dt) {
  if (!(t1 > t0)) {
    throw ArgumentError("lsde_exact_moments needs t1 > t0");
  }
  if (!(quad_dt > 0.0)) {
    throw ArgumentError("quad_dt must be positive");
  }
  using State = std::array<double, 2>;
  const State out = rk4(State{x0, 0.0}, t0, t1, quad_dt, [&](double t, const State& y) {
    const double a = params.a(t);
    const double s = params.sigma(t);
    return State{a * y[0] + params.b(t), 2.0 * a * y[1] + s * s};
  });
  return {out[0], out[1]};
}

Car4Moments car4_exact_moments(const Car4Params& params, const Vector4& y0, double dt, double quad_dt) {
  if (!(dt > 0.0)) {
    throw ArgumentError("car4_exact_moments needs dt > 0");
  }
  if (!(quad_dt > 0.0)) {
    throw ArgumentError("quad_dt must be positive");
  }
  using State = std::array<double, 20>;  // mean (4) then covariance (16)
  const auto& a = params.a;
  const auto& e = params.e;
  State init{};
  std::copy(y0.begin(), y0.end(), init.begin());
  const State out = rk4(init, 0.0, dt, quad_dt, [&](double, const State& y) {
    State d{};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t k = 0; k < 4; ++k) d[r] += a[4 * r + k] * y[k];
    }
    const double* c = y.data() + 4;
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t s = 0; s < 4; ++s) {
        double ac = 0.0;
        double ca = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
          ac += a[4 * r + k] * c[4 * k + s];
          ca += c[4 * r + k] * a[4 * s + k];
        }
        d[4 + 4 * r + s] = ac + ca + e[r] * e[s];
      }
    }
    return d;
  });
  Car4Moments m;
  std::copy(out.begin(), out.begin() + 4, m.mean.begin());
  std::copy(out.begin() + 4, out.end(), m.cov.begin());
  // Symmetrize round-off.
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t s = r + 1; s < 4; ++s) {
      const double avg = 0.5 * (m.cov[4 * r + s] + m.cov[4 * s + r]);
      m.cov[4 * r + s] = avg;
      m.cov[4 * s + r] = avg;
    }
  }
  return m;
}

Car4ObservableTransition::Car4ObservableTransition(const Car4Params& params) {
  Vector4 row = {1.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < kTerms; ++k) {
    row_coefficients_[k] = row;
    Vector4 next{};
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t r = 0; r < 4; ++r) next[c] += row[r] * params.a[4 * r + c];
      next[c] /= static_cast<double>(k + 1);
    }
    row = next;
  }
  // g(s) = row(s) . e as a polynomial, then integral of g^2.
  std::array<double, kTerms> g{};
  for (std::size_t k = 0; k < kTerms; ++k) {
    for (std::size_t c = 0; c < 4; ++c) g[k] += row_coefficients_[k][c] * params.e[c];
  }
  variance_coefficients_.assign(2 * kTerms, 0.0);
  for (std::size_t i = 0; i < kTerms; ++i) {
    for (std::size_t j = 0; j < kTerms; ++j) {
      variance_coefficients_[i + j + 1] += g[i] * g[j] / static_cast<double>(i + j + 1);
    }
  }
}

Vector4 Car4ObservableTransition::row(double tau) const {
  Vector4 out{};
  for (std::size_t k = kTerms; k-- > 0;) {
    for (std::size_t c = 0; c < 4; ++c) out[c] = out[c] * tau + row_coefficients_[k][c];
  }
  return out;
}

double Car4ObservableTransition::variance(double tau) const {
  double out = 0.0;
  for (std::size_t k = variance_coefficients_.size(); k-- > 0;) {
    out = out * tau + variance_coefficients_[k];
  }
  return out;
}

}  // namespace ctpf
