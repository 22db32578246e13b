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

#include "ctpf/inference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include "ctpf/errors.hpp"
#include "ctpf/log_weights.hpp"
#include "ctpf/random.hpp"

namespace ctpf {
namespace {

using Sink = std::function<void(std::size_t index, std::vector<double> prediction)>;

// Weighted mean of decoded prior (or posterior) extrapolations from t_from to
// t_to. Particle j, inner sample r uses prediction stream (step, j * inner + r).
std::vector<double> extrapolate(const LatentSdeModel& model, const ParticleSet& particles,
                                std::span<const double> weights, const SdeFunctions& dynamics, double t_from,
                                double t_to, std::size_t step, const FilterConfig& config, std::uint64_t seed,
                                std::size_t inner, ThreadPool* pool) {
  if (!(t_to > t_from)) {
    throw ArgumentError("prediction time must be after the last known observation");
  }
  const std::size_t n = particles.size();
  const std::size_t d = particles.dim();
  const std::size_t m = model.obs_dim();
  std::vector<double> decoded(n * m, 0.0);
  auto body = [&](std::size_t j) {
    try {
      std::vector<double> mean(m);
      for (std::size_t r = 0; r < inner; ++r) {
        auto rng = make_stream(seed, StreamDomain::kPrediction, step, j * inner + r);
        const WienerSegment segment = sample_wiener_segment(t_to - t_from, config.dt, d, rng);
        const AugmentedResult solved = euler_maruyama(dynamics, particles.state(j), t_from, segment, config.solver);
        model.decoder_mean(solved.terminal_state, mean);
        for (std::size_t c = 0; c < m; ++c) decoded[j * m + c] += mean[c];
      }
    } catch (Error& e) {
      e.add_context("particle " + std::to_string(j));
      throw;
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(n, body);
  } else {
    for (std::size_t j = 0; j < n; ++j) body(j);
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < m; ++c) out[c] += weights[j] * decoded[j * m + c] / static_cast<double>(inner);
  }
  return out;
}

// Filters through `steps` observations and, after step i, predicts at
// next_time(i) for every i with a target time.
void prediction_pass(const LatentSdeModel& model, const ObservationSequence& observations, std::size_t steps,
                     const std::function<std::optional<double>(std::size_t)>& next_time, const FilterConfig& config,
                     std::uint64_t seed, PredictionMethod method, std::size_t inner, ThreadPool* pool,
                     const Sink& sink) {
  config.validate();
  if (inner == 0) {
    throw ArgumentError("inner_samples must be at least 1");
  }
  if (steps == 0 || steps > observations.size()) {
    throw ArgumentError("prediction needs at least one known observation");
  }
  const ObservationSequence known = observations.prefix(steps);

  if (method == PredictionMethod::kParticleFilter) {
    run_filter(model, known, config, seed, pool, [&](std::size_t i, const ParticleSet& particles) {
      const std::optional<double> t_next = next_time(i);
      if (!t_next) return;
      const std::vector<double> weights = particles.weights();
      sink(i, extrapolate(model, particles, weights, model.prior(), known.grid[i], *t_next, i, config, seed, inner,
                          pool));
    });
    return;
  }

  known.validate(model.obs_dim());
  const std::size_t n = config.particles;
  ParticleSet particles(n, model.initial_state());
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < steps; ++i) {
    const double t_start = known.grid.interval_start(i);
    const double t_end = known.grid[i];
    auto body = [&](std::size_t j) {
      try {
        auto rng = make_stream(seed, StreamDomain::kPropagation, i, j);
        const WienerSegment segment = sample_wiener_segment(t_end - t_start, config.dt, particles.dim(), rng);
        ProposalContext context{t_start, t_end, particles.state(j), &known, i, true};
        const AugmentedResult solved =
            augmented_solve(model.prior(), model.posterior_drift(context), particles.state(j), t_start, segment,
                            config.solver);
        std::copy(solved.terminal_state.begin(), solved.terminal_state.end(), particles.state(j).begin());
      } catch (Error& e) {
        e.add_context("particle " + std::to_string(j));
        throw;
      }
    };
    if (pool != nullptr) {
      pool->parallel_for(n, body);
    } else {
      for (std::size_t j = 0; j < n; ++j) body(j);
    }
    const std::optional<double> t_next = next_time(i);
    if (!t_next) continue;
    // Extrapolation drift is the posterior without a target; it is fixed per
    // particle, so each particle gets its own dynamics.
    std::vector<double> decoded(n * model.obs_dim());
    std::vector<double> prediction(model.obs_dim(), 0.0);
    auto predict_one = [&](std::size_t j) {
      ProposalContext context{t_end, *t_next, particles.state(j), &known, i + 1, false};
      const SdeFunctions dynamics{model.state_dim(), model.posterior_drift(context), model.prior().diffusion};
      // Same (step, particle) stream layout as the PF method.
      std::vector<double> mean(model.obs_dim(), 0.0);
      for (std::size_t r = 0; r < inner; ++r) {
        auto rng = make_stream(seed, StreamDomain::kPrediction, i, j * inner + r);
        const WienerSegment segment = sample_wiener_segment(*t_next - t_end, config.dt, particles.dim(), rng);
        const AugmentedResult solved = euler_maruyama(dynamics, particles.state(j), t_end, segment, config.solver);
        model.decoder_mean(solved.terminal_state, mean);
        for (std::size_t c = 0; c < mean.size(); ++c) decoded[j * mean.size() + c] += mean[c];
      }
    };
    if (!(*t_next > t_end)) {
      throw ArgumentError("prediction time must be after the last known observation");
    }
    if (pool != nullptr) {
      pool->parallel_for(n, predict_one);
    } else {
      for (std::size_t j = 0; j < n; ++j) predict_one(j);
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < prediction.size(); ++c) {
        prediction[c] += uniform[j] * decoded[j * prediction.size() + c] / static_cast<double>(inner);
      }
    }
    sink(i, std::move(prediction));
  }
}

double sample_mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double standard_error_of_mean(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
}

nlohmann::json config_echo(const Dataset& dataset, const EvalConfig& config, std::string_view task,
                           std::string_view method) {
  const FilterConfig& f = config.filter;
  return {
      {"task", task},
      {"method", method},
      {"process", to_string(dataset.process.kind())},
      {"lambda", dataset.config.intensity},
      {"horizon", dataset.config.horizon},
      {"dataset_seed", dataset.config.seed},
      {"sequences", dataset.sequences.size()},
      {"particles", f.particles},
      {"dt", f.dt},
      {"tau", f.policy.threshold_fraction},
      {"scheme", to_string(f.policy.scheme)},
      {"resampling", f.policy.enabled},
      {"sigma_floor", f.solver.sigma_floor},
      {"u_max", f.solver.u_max},
      {"seed", config.seed},
      {"seeds", config.seeds},
      {"inner_samples", config.inner_samples},
  };
}

// Evaluates metric(sequence, repetition) for every pair, in parallel over
// pairs, and aggregates per sequence.
EvalReport evaluate(const Dataset& dataset, const EvalConfig& config,
                    const std::function<double(std::size_t, std::size_t, ThreadPool*)>& metric) {
  config.validate();
  if (dataset.sequences.empty()) {
    throw ArgumentError("dataset has no sequences");
  }
  const std::size_t count = dataset.sequences.size();
  const std::size_t seeds = config.seeds;
  std::vector<double> values(count * seeds, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(count * seeds);

  ThreadPool pool(config.threads);
  pool.parallel_for(count * seeds, [&](std::size_t job) {
    const std::size_t k = job / seeds;
    const std::size_t r = job % seeds;
    try {
      values[job] = metric(k, r, &pool);
    } catch (NumericalError& e) {
      errors[job] = "sequence " + std::to_string(k) + ", seed " + std::to_string(r) + ": " + e.what();
    } catch (Error& e) {
      e.add_context("sequence " + std::to_string(k));
      throw;
    }
  });

  EvalReport report;
  std::vector<double> good;
  std::vector<double> seed_sums(seeds, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    SequenceMetric entry;
    entry.sequence = k;
    entry.observations = dataset.sequences[k].size();
    entry.per_seed.assign(values.begin() + static_cast<std::ptrdiff_t>(k * seeds),
                          values.begin() + static_cast<std::ptrdiff_t>((k + 1) * seeds));
    for (std::size_t r = 0; r < seeds; ++r) {
      if (!errors[k * seeds + r].empty() && entry.error.empty()) {
        entry.failed = true;
        entry.error = errors[k * seeds + r];
      }
    }
    if (entry.failed) {
      entry.value = std::numeric_limits<double>::quiet_NaN();
      ++report.failures;
    } else {
      entry.value = sample_mean(entry.per_seed);
      good.push_back(entry.value);
      for (std::size_t r = 0; r < seeds; ++r) seed_sums[r] += entry.per_seed[r];
    }
    report.sequences.push_back(std::move(entry));
  }
  if (good.empty()) {
    report.mean = std::numeric_limits<double>::quiet_NaN();
    report.standard_error = std::numeric_limits<double>::quiet_NaN();
    report.seed_means.assign(seeds, std::numeric_limits<double>::quiet_NaN());
  } else {
    report.mean = sample_mean(good);
    report.standard_error = standard_error_of_mean(good);
    for (double s : seed_sums) report.seed_means.push_back(s / static_cast<double>(good.size()));
  }
  return report;
}

}  // namespace

std::string_view to_string(PredictionMethod method) {
  return method == PredictionMethod::kParticleFilter ? "pf" : "posterior";
}

PredictionMethod parse_prediction_method(std::string_view text) {
  if (text == "pf") return PredictionMethod::kParticleFilter;
  if (text == "posterior") return PredictionMethod::kPosterior;
  throw ArgumentError("unknown prediction method '" + std::string(text) + "' (expected pf or posterior)");
}

void EvalConfig::validate() const {
  filter.validate();
  if (seeds == 0) throw ArgumentError("number of seeds must be at least 1");
  if (inner_samples == 0) throw ArgumentError("inner_samples must be at least 1");
}

std::uint64_t sequence_key(const ObservationSequence& sequence) {
  std::uint64_t h = mix64(sequence.size());
  auto fold = [&h](double v) { h = mix64(h ^ std::bit_cast<std::uint64_t>(v)); };
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    fold(sequence.grid[i]);
    for (double x : sequence.values[i]) fold(x);
  }
  return h;
}

std::uint64_t filter_seed(std::uint64_t master, std::uint64_t key, std::size_t repetition) {
  return derive_seed(master, key, repetition);
}

std::vector<std::uint64_t> sequence_keys(const Dataset& dataset) {
  std::vector<std::uint64_t> keys;
  keys.reserve(dataset.sequences.size());
  for (const auto& seq : dataset.sequences) keys.push_back(sequence_key(seq));
  return keys;
}

EvalReport estimate_nll(const LatentSdeModel& model, const Dataset& dataset, const EvalConfig& config) {
  const std::vector<std::uint64_t> keys = sequence_keys(dataset);
  const std::string method = config.filter.policy.enabled ? "pf" : "sis";
  EvalReport report = evaluate(dataset, config, [&](std::size_t k, std::size_t r, ThreadPool* pool) {
    return run_filter(model, dataset.sequences[k], config.filter, filter_seed(config.seed, keys[k], r), pool)
        .nll_per_observation();
  });
  report.task = "nll";
  report.method = method;
  report.config = config_echo(dataset, config, report.task, method);
  report.config["metric"] = "negative log-likelihood per observation, averaged over sequences";
  return report;
}

std::vector<double> predict_next(const LatentSdeModel& model, const ObservationSequence& observations,
                                 std::size_t known, double t_next, const FilterConfig& config, std::uint64_t seed,
                                 PredictionMethod method, std::size_t inner_samples, ThreadPool* pool) {
  std::vector<double> out;
  prediction_pass(
      model, observations, known,
      [&](std::size_t i) -> std::optional<double> {
        if (i + 1 == known) return t_next;
        return std::nullopt;
      },
      config, seed, method, inner_samples, pool, [&](std::size_t, std::vector<double> p) { out = std::move(p); });
  return out;
}

std::vector<std::vector<double>> predict_sequence(const LatentSdeModel& model, const ObservationSequence& observations,
                                                  const FilterConfig& config, std::uint64_t seed,
                                                  PredictionMethod method, std::size_t inner_samples,
                                                  ThreadPool* pool) {
  const std::size_t n = observations.size();
  if (n < 2) {
    throw ArgumentError("sequential prediction needs at least two observations");
  }
  std::vector<std::vector<double>> out(n - 1);
  prediction_pass(
      model, observations, n - 1,
      [&](std::size_t i) -> std::optional<double> { return observations.grid[i + 1]; }, config, seed, method,
      inner_samples, pool, [&](std::size_t i, std::vector<double> p) { out[i] = std::move(p); });
  return out;
}

EvalReport sequential_prediction_eval(const LatentSdeModel& model, const Dataset& dataset, const EvalConfig& config,
                                      PredictionMethod method) {
  for (std::size_t k = 0; k < dataset.sequences.size(); ++k) {
    if (dataset.sequences[k].size() < 2) {
      throw ArgumentError("sequence " + std::to_string(k) + " has fewer than two observations");
    }
  }
  const std::vector<std::uint64_t> keys = sequence_keys(dataset);
  EvalReport report = evaluate(dataset, config, [&](std::size_t k, std::size_t r, ThreadPool* pool) {
    const ObservationSequence& seq = dataset.sequences[k];
    const auto predictions =
        predict_sequence(model, seq, config.filter, filter_seed(config.seed, keys[k], r), method, config.inner_samples, pool);
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      double ss = 0.0;
      for (std::size_t c = 0; c < predictions[i].size(); ++c) {
        const double diff = predictions[i][c] - seq.values[i + 1][c];
        ss += diff * diff;
      }
      total += std::sqrt(ss);
    }
    return total / static_cast<double>(predictions.size());
  });
  report.task = "prediction";
  report.method = std::string(to_string(method));
  report.config = config_echo(dataset, config, report.task, report.method);
  report.config["metric"] = "L2 error averaged per predicted point within a sequence, then over sequences";
  return report;
}

}  // namespace ctpf
