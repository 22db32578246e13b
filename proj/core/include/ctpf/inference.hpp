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

#ifndef CTPF_INFERENCE_HPP
#define CTPF_INFERENCE_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctpf/dataset.hpp"
#include "ctpf/latent_model.hpp"
#include "ctpf/particle_filter.hpp"

namespace ctpf {

enum class PredictionMethod {
  kParticleFilter,  // weighted particles, prior extrapolation
  kPosterior,       // unweighted posterior samples
};

std::string_view to_string(PredictionMethod method);
PredictionMethod parse_prediction_method(std::string_view text);

struct EvalConfig {
  FilterConfig filter;
  std::uint64_t seed = 0;
  /// Independent filter runs per sequence; run r of sequence s uses
  /// filter_seed(seed, sequence_key(s), r), so PF and SIS runs are paired and
  /// results do not depend on where a sequence sits in the dataset.
  std::size_t seeds = 1;
  /// Prior samples per particle when extrapolating a prediction.
  std::size_t inner_samples = 1;
  std::size_t threads = 1;

  void validate() const;
};

struct SequenceMetric {
  std::size_t sequence = 0;
  std::size_t observations = 0;
  std::vector<double> per_seed;
  double value = 0.0;  // mean over seeds
  bool failed = false;
  std::string error;
};

struct EvalReport {
  std::string task;    // "nll" or "prediction"
  std::string method;  // "pf", "sis" or "posterior"
  std::vector<SequenceMetric> sequences;
  /// Mean over successful sequences, one entry per seed.
  std::vector<double> seed_means;
  double mean = 0.0;
  double standard_error = 0.0;  // across sequences
  std::size_t failures = 0;
  nlohmann::json config;
};

/// Hash of a sequence's times and values.
std::uint64_t sequence_key(const ObservationSequence& sequence);

std::uint64_t filter_seed(std::uint64_t master, std::uint64_t key, std::size_t repetition);

/// Per-observation NLL of every sequence, via run_filter (run_sis when the
/// resampling policy is disabled). Sequences that fail numerically are
/// reported as failed and left out of the aggregate.
EvalReport estimate_nll(const LatentSdeModel& model, const Dataset& dataset, const EvalConfig& config);

/// Predicts E[X(t_next)] from the first `known` observations. The PF method
/// filters through t_{known-1} and extrapolates each particle under the prior
/// drift; the posterior method propagates under the posterior drift, without
/// weights, for the whole way.
std::vector<double> predict_next(const LatentSdeModel& model, const ObservationSequence& observations,
                                 std::size_t known, double t_next, const FilterConfig& config, std::uint64_t seed,
                                 PredictionMethod method, std::size_t inner_samples = 1, ThreadPool* pool = nullptr);

/// Every one-step-ahead prediction of a sequence, in one filtering pass.
/// Entry i predicts observation i + 1 and equals predict_next with
/// known = i + 1.
std::vector<std::vector<double>> predict_sequence(const LatentSdeModel& model, const ObservationSequence& observations,
                                                  const FilterConfig& config, std::uint64_t seed,
                                                  PredictionMethod method, std::size_t inner_samples = 1,
                                                  ThreadPool* pool = nullptr);

/// Mean L2 distance between one-step-ahead predictions and the observations,
/// averaged over the predicted points of each sequence.
EvalReport sequential_prediction_eval(const LatentSdeModel& model, const Dataset& dataset, const EvalConfig& config,
                                      PredictionMethod method);

}  // namespace ctpf

#endif  // CTPF_INFERENCE_HPP
