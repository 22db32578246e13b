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


#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ctpf/dataset.hpp"
#include "ctpf/errors.hpp"
#include "ctpf/inference.hpp"
#include "ctpf/latent_model.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctpf;

namespace {

Dataset gbm_dataset(std::size_t sequences, double horizon = 5.0) {
  SimulationConfig sim;
  sim.sequences = sequences;
  sim.seed = 3;
  sim.dt = 1e-3;
  sim.horizon = horizon;
  return simulate_dataset(ProcessSpec::gbm(), sim);
}

EvalConfig small_eval(std::size_t particles = 32) {
  EvalConfig config;
  config.filter.particles = particles;
  config.filter.dt = 1e-2;
  config.seed = 11;
  config.seeds = 2;
  return config;
}

// Forwards to an oracle model and records the latest interval end any
// posterior drift was requested for.
class Recording final : public LatentSdeModel {
 public:
  explicit Recording(std::unique_ptr<LatentSdeModel> inner) : inner_(std::move(inner)) {}
  std::size_t state_dim() const override { return inner_->state_dim(); }
  std::size_t obs_dim() const override { return inner_->obs_dim(); }
  const SdeFunctions& prior() const override { return inner_->prior(); }
  std::vector<double> initial_state() const override { return inner_->initial_state(); }
  VectorField posterior_drift(const ProposalContext& c) const override {
    double seen = latest_.load();
    while (c.t_end > seen && !latest_.compare_exchange_weak(seen, c.t_end)) {
    }
    return inner_->posterior_drift(c);
  }
  double decoder_loglik(std::span<const double> z, std::span<const double> x,
                        const ObservationHistory& h) const override {
    return inner_->decoder_loglik(z, x, h);
  }
  void decoder_mean(std::span<const double> z, std::span<double> out) const override { inner_->decoder_mean(z, out); }
  double latest() const { return latest_.load(); }

 private:
  std::unique_ptr<LatentSdeModel> inner_;
  mutable std::atomic<double> latest_{0.0};
};

// Fails numerically on sequences whose first observation exceeds a cutoff.
class FailsAbove final : public LatentSdeModel {
 public:
  explicit FailsAbove(double cutoff) : inner_(oracle_model(ProcessSpec::gbm(), 1e-2, 1.0)), cutoff_(cutoff) {}
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  const SdeFunctions& prior() const override { return inner_->prior(); }
  std::vector<double> initial_state() const override { return {1.0}; }
  VectorField posterior_drift(const ProposalContext& c) const override {
    if (c.observations->values[0][0] > cutoff_) {
      return [](std::span<const double>, double, std::span<double> out) { out[0] = std::nan(""); };
    }
    return inner_->posterior_drift(c);
  }
  double decoder_loglik(std::span<const double> z, std::span<const double> x,
                        const ObservationHistory& h) const override {
    return inner_->decoder_loglik(z, x, h);
  }
  void decoder_mean(std::span<const double> z, std::span<double> out) const override { out[0] = z[0]; }

 private:
  std::unique_ptr<LatentSdeModel> inner_;
  double cutoff_;
};

}  // namespace

TEST_CASE("prediction methods parse") {
  CHECK(parse_prediction_method("pf") == PredictionMethod::kParticleFilter);
  CHECK(parse_prediction_method("posterior") == PredictionMethod::kPosterior);
  CHECK(to_string(PredictionMethod::kPosterior) == "posterior");
  CHECK_THROWS_AS(parse_prediction_method("kalman"), ArgumentError);
}

TEST_CASE("evaluation configuration validation") {
  EvalConfig config;
  CHECK_NOTHROW(config.validate());
  config.seeds = 0;
  CHECK_THROWS_AS(config.validate(), ArgumentError);
  config.seeds = 1;
  config.inner_samples = 0;
  CHECK_THROWS_AS(config.validate(), ArgumentError);
}

TEST_CASE("sequence keys depend on content only") {
  const Dataset data = gbm_dataset(3);
  CHECK(sequence_key(data.sequences[0]) == sequence_key(Dataset(data).sequences[0]));
  CHECK(sequence_key(data.sequences[0]) != sequence_key(data.sequences[1]));
  ObservationSequence nudged = data.sequences[0];
  nudged.values.back()[0] = std::nextafter(nudged.values.back()[0], 10.0);
  CHECK(sequence_key(nudged) != sequence_key(data.sequences[0]));
  CHECK(sequence_key(data.sequences[0].prefix(3)) != sequence_key(data.sequences[0].prefix(4)));
}

TEST_CASE("NLL estimation reports per-sequence values and the method") {
  const Dataset data = gbm_dataset(4);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  EvalConfig config = small_eval();
  const EvalReport pf = estimate_nll(*model, data, config);
  CHECK(pf.task == "nll");
  CHECK(pf.method == "pf");
  REQUIRE(pf.sequences.size() == 4);
  REQUIRE(pf.seed_means.size() == 2);
  CHECK(pf.failures == 0);
  double sum = 0.0;
  for (const auto& s : pf.sequences) {
    CHECK(s.per_seed.size() == 2);
    CHECK(s.value == doctest::Approx((s.per_seed[0] + s.per_seed[1]) / 2.0));
    CHECK(s.observations == data.sequences[s.sequence].size());
    sum += s.value;
  }
  CHECK(pf.mean == doctest::Approx(sum / 4.0));
  CHECK(pf.standard_error > 0.0);
  CHECK(pf.config.at("particles") == 32);
  CHECK(pf.config.at("process") == "gbm");

  config.filter.policy.enabled = false;
  CHECK(estimate_nll(*model, data, config).method == "sis");
}

TEST_CASE("one particle makes PF and SIS estimates identical") {
  const Dataset data = gbm_dataset(3);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  EvalConfig config = small_eval(1);
  const EvalReport pf = estimate_nll(*model, data, config);
  config.filter.policy.enabled = false;
  const EvalReport sis = estimate_nll(*model, data, config);
  for (std::size_t k = 0; k < 3; ++k) CHECK(pf.sequences[k].per_seed == sis.sequences[k].per_seed);
}

TEST_CASE("aggregates do not depend on the order of the sequences") {
  const Dataset data = gbm_dataset(5);
  Dataset reversed = data;
  std::reverse(reversed.sequences.begin(), reversed.sequences.end());
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  const EvalReport a = estimate_nll(*model, data, small_eval());
  const EvalReport b = estimate_nll(*model, reversed, small_eval());
  for (std::size_t k = 0; k < 5; ++k) CHECK(a.sequences[k].per_seed == b.sequences[4 - k].per_seed);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
  CHECK(a.standard_error == doctest::Approx(b.standard_error).epsilon(1e-12));

  const EvalReport pa = sequential_prediction_eval(*model, data, small_eval(), PredictionMethod::kParticleFilter);
  const EvalReport pb = sequential_prediction_eval(*model, reversed, small_eval(), PredictionMethod::kParticleFilter);
  CHECK(pa.mean == doctest::Approx(pb.mean).epsilon(1e-14));
}

TEST_CASE("results do not depend on the number of threads") {
  const Dataset data = gbm_dataset(4);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  EvalConfig config = small_eval();
  const EvalReport one = estimate_nll(*model, data, config);
  config.threads = 3;
  const EvalReport three = estimate_nll(*model, data, config);
  for (std::size_t k = 0; k < 4; ++k) CHECK(one.sequences[k].per_seed == three.sequences[k].per_seed);
  CHECK(std::memcmp(&one.mean, &three.mean, sizeof(double)) == 0);
}

TEST_CASE("numerical failures are reported, not dropped silently") {
  const Dataset data = gbm_dataset(6);
  std::vector<double> firsts;
  for (const auto& s : data.sequences) firsts.push_back(s.values[0][0]);
  std::vector<double> sorted = firsts;
  std::sort(sorted.begin(), sorted.end());
  const FailsAbove model(sorted[4]);  // the largest first value fails
  const EvalReport report = estimate_nll(model, data, small_eval());
  CHECK(report.failures == 1);
  std::size_t failed = 0;
  double sum = 0.0;
  for (const auto& s : report.sequences) {
    if (s.failed) {
      ++failed;
      CHECK(std::isnan(s.value));
      CHECK(s.error.find("sequence " + std::to_string(s.sequence)) != std::string::npos);
      CHECK(s.error.find("proposal explosion") != std::string::npos);
    } else {
      sum += s.value;
    }
  }
  CHECK(failed == 1);
  CHECK(report.mean == doctest::Approx(sum / 5.0));
}

TEST_CASE("invalid sequences abort the evaluation with context") {
  Dataset data = gbm_dataset(3);
  data.sequences[1].values[0].push_back(1.0);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  try {
    estimate_nll(*model, data, small_eval());
    FAIL("expected an argument error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("sequence 1") != std::string::npos);
  }
  Dataset empty = data;
  empty.sequences.clear();
  CHECK_THROWS_AS(estimate_nll(*model, empty, small_eval()), ArgumentError);
}

TEST_CASE("prediction argument checks") {
  const Dataset data = gbm_dataset(1);
  const ObservationSequence& seq = data.sequences[0];
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  FilterConfig config;
  config.particles = 8;
  config.dt = 1e-2;
  for (auto method : {PredictionMethod::kParticleFilter, PredictionMethod::kPosterior}) {
    CHECK_THROWS_AS(predict_next(*model, seq, 0, 1.0, config, 1, method), ArgumentError);
    CHECK_THROWS_AS(predict_next(*model, seq, 2, seq.grid[1], config, 1, method), ArgumentError);
    CHECK_THROWS_AS(predict_next(*model, seq, seq.size() + 1, 100.0, config, 1, method), ArgumentError);
    CHECK_THROWS_AS(predict_next(*model, seq, 2, seq.grid[2], config, 1, method, 0), ArgumentError);
    CHECK_THROWS_AS(predict_sequence(*model, seq.prefix(1), config, 1, method), ArgumentError);
  }
}

TEST_CASE("one pass over a sequence matches separate next-step predictions") {
  const Dataset data = gbm_dataset(1, 3.0);
  const ObservationSequence& seq = data.sequences[0];
  REQUIRE(seq.size() >= 3);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  FilterConfig config;
  config.particles = 16;
  config.dt = 1e-2;
  for (auto method : {PredictionMethod::kParticleFilter, PredictionMethod::kPosterior}) {
    const auto all = predict_sequence(*model, seq, config, 4, method, 2);
    REQUIRE(all.size() == seq.size() - 1);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto one = predict_next(*model, seq, i + 1, seq.grid[i + 1], config, 4, method, 2);
      REQUIRE(one == all[i]);
    }
  }
}

TEST_CASE("PF prediction extrapolates under the prior only") {
  const Dataset data = gbm_dataset(1);
  const ObservationSequence& seq = data.sequences[0];
  const Recording model(oracle_model(data.process, 1e-2, 1.0));
  FilterConfig config;
  config.particles = 8;
  config.dt = 1e-2;
  predict_next(model, seq, 3, seq.grid[2] + 2.0, config, 1, PredictionMethod::kParticleFilter);
  CHECK(model.latest() == seq.grid[2]);
}

TEST_CASE("PF prediction of GBM follows the conditional mean") {
  const auto model = oracle_model(ProcessSpec::gbm(), 1e-3, 1.0);
  const ObservationSequence seq = testing::make_sequence({0.5, 1.0}, {1.08, 1.15});
  FilterConfig config;
  config.particles = 125;
  config.dt = 1e-3;
  const double delta = 0.5;
  const auto prediction =
      predict_next(*model, seq, 2, 1.0 + delta, config, 8, PredictionMethod::kParticleFilter, 40);
  const double expected = 1.15 * std::exp(0.2 * delta);
  CHECK(std::abs(prediction[0] - expected) / expected < 0.02);
}

TEST_CASE("without noise the prediction is the deterministic flow for any particle count") {
  const auto model = oracle_model(ProcessSpec::lsde(testing::constant_lsde(-0.5, 0.3, 0.0)), 0.1, 1.0);
  const ObservationSequence seq = testing::make_sequence({0.5, 1.0}, {0.1, 0.2});
  FilterConfig config;
  config.dt = 1e-3;
  config.particles = 1;
  const auto one = predict_next(*model, seq, 2, 2.0, config, 1, PredictionMethod::kParticleFilter);
  config.particles = 40;
  const auto many = predict_next(*model, seq, 2, 2.0, config, 1, PredictionMethod::kParticleFilter);
  const auto posterior = predict_next(*model, seq, 2, 2.0, config, 1, PredictionMethod::kPosterior);
  CHECK(many[0] == doctest::Approx(one[0]).epsilon(1e-12));
  CHECK(posterior[0] == doctest::Approx(one[0]).epsilon(1e-12));
  // dX = (-X/2 + 0.3) dt from X(0) = 0, evaluated at t = 2.
  CHECK(one[0] == doctest::Approx(0.6 * (1.0 - std::exp(-1.0))).epsilon(1e-3));
}

TEST_CASE("prediction L2 metric averages per point within a sequence") {
  const Dataset data = gbm_dataset(2);
  const auto model = oracle_model(data.process, 1e-2, 1.0);
  EvalConfig config = small_eval();
  config.seeds = 1;
  const EvalReport report = sequential_prediction_eval(*model, data, config, PredictionMethod::kParticleFilter);
  CHECK(report.task == "prediction");
  CHECK(report.method == "pf");
  for (std::size_t k = 0; k < 2; ++k) {
    const ObservationSequence& seq = data.sequences[k];
    const auto predictions = predict_sequence(*model, seq, config.filter,
                                              filter_seed(config.seed, sequence_key(seq), 0),
                                              PredictionMethod::kParticleFilter);
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) total += std::abs(predictions[i][0] - seq.values[i + 1][0]);
    CHECK(report.sequences[k].value == doctest::Approx(total / static_cast<double>(predictions.size())));
  }
  Dataset short_one = data;
  short_one.sequences[1] = short_one.sequences[1].prefix(1);
  CHECK_THROWS_AS(sequential_prediction_eval(*model, short_one, config, PredictionMethod::kParticleFilter),
                  ArgumentError);
}
