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


#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctpf/errors.hpp"
#include "ctpf/latent_model.hpp"
#include "ctpf/mlp.hpp"
#include "ctpf/random.hpp"
#include "ctpf/sde.hpp"
#include "ctpf/wiener.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctpf;

namespace {

ProposalContext context_for(const ObservationSequence& seq, std::size_t known, std::span<const double> z) {
  ProposalContext c;
  c.t_start = seq.grid.interval_start(known);
  c.t_end = seq.grid[known];
  c.z_start = z;
  c.observations = &seq;
  c.known = known;
  return c;
}

}  // namespace

TEST_CASE("oracle decoder is a Gaussian around the observed coordinates") {
  const auto model = oracle_model(ProcessSpec::gbm(), 1e-2, 1.0);
  const std::vector<double> z = {1.7};
  CHECK(model->decoder_loglik(z, z, {}) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 1e-4)));
  const std::vector<double> x = {1.72};
  CHECK(model->decoder_loglik(z, x, {}) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 1e-4) - 0.5 * 4.0).epsilon(1e-12));

  const auto car = oracle_model(ProcessSpec::car4(), 0.5, 1.0);
  const std::vector<double> y1 = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y2 = {1.0, -5.0, 0.0, 9.0};
  const std::vector<double> obs = {1.3};
  CHECK(car->decoder_loglik(y1, obs, {}) == car->decoder_loglik(y2, obs, {}));
  std::vector<double> mean(1);
  car->decoder_mean(y2, mean);
  CHECK(mean[0] == 1.0);
}

TEST_CASE("oracle model rejects invalid settings") {
  CHECK_THROWS_AS(OracleModel(ProcessSpec::gbm(), 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(OracleModel(ProcessSpec::gbm(), std::nan(""), 1.0), ArgumentError);
  CHECK_THROWS_AS(OracleModel(ProcessSpec::gbm(), 0.1, -1.0), ArgumentError);
}

TEST_CASE("zero gain or a missing target leaves the prior drift in place") {
  const ObservationSequence seq = testing::make_sequence({1.0}, {1.3});
  const std::vector<double> z0 = {1.0};
  Philox4x32 rng(1, 0);
  const WienerSegment seg = sample_wiener_segment(1.0, 0.01, 1, rng);

  const auto bootstrap = oracle_model(ProcessSpec::gbm(), 1e-2, 0.0);
  const AugmentedResult a = augmented_solve(bootstrap->prior(), bootstrap->posterior_drift(context_for(seq, 0, z0)),
                                            z0, 0.0, seg);
  CHECK(a.log_m == 0.0);

  const auto guided = oracle_model(ProcessSpec::gbm(), 1e-2, 1.0);
  ProposalContext c = context_for(seq, 0, z0);
  c.use_target = false;
  CHECK(augmented_solve(guided->prior(), guided->posterior_drift(c), z0, 0.0, seg).log_m == 0.0);
  c.use_target = true;
  c.known = 1;  // past the end of the sequence
  CHECK(c.target() == nullptr);
}

TEST_CASE("the guided proposal lands closer to the observation than the prior") {
  const ObservationSequence seq = testing::make_sequence({1.0}, {1.3});
  const auto bootstrap = oracle_model(ProcessSpec::gbm(), 1e-2, 0.0);
  const auto guided = oracle_model(ProcessSpec::gbm(), 1e-2, 1.0);
  const std::vector<double> z0 = {1.0};
  double err_bootstrap = 0.0;
  double err_guided = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Philox4x32 rng = make_stream(3, StreamDomain::kSelfTest, i);
    const WienerSegment seg = sample_wiener_segment(1.0, 1e-2, 1, rng);
    const auto ctx = context_for(seq, 0, z0);
    err_bootstrap += std::abs(
        augmented_solve(bootstrap->prior(), bootstrap->posterior_drift(ctx), z0, 0.0, seg).terminal_state[0] - 1.3);
    err_guided += std::abs(
        augmented_solve(guided->prior(), guided->posterior_drift(ctx), z0, 0.0, seg).terminal_state[0] - 1.3);
  }
  CHECK(err_guided < 0.5 * err_bootstrap);
}

TEST_CASE("guided proposals stay within the control bound near zero") {
  const ObservationSequence seq = testing::make_sequence({1.0}, {5.0});
  const auto guided = oracle_model(ProcessSpec::gbm(), 1e-3, 1.0);
  for (double start : {0.0, 1e-12, 1e-8, 1e-4}) {
    const std::vector<double> z0 = {start};
    Philox4x32 rng(7, 0);
    const WienerSegment seg = sample_wiener_segment(1.0, 1e-3, 1, rng);
    CHECK_NOTHROW(augmented_solve(guided->prior(), guided->posterior_drift(context_for(seq, 0, z0)), z0, 0.0, seg));
  }
}

TEST_CASE("the CAR4 guide only acts through the driven coordinate") {
  const ObservationSequence seq = testing::make_sequence({2.0}, {3.0});
  const auto model = oracle_model(ProcessSpec::car4(), 0.5, 1.0);
  const std::vector<double> y = {0.5, 0.1, -0.2, 0.3};
  const VectorField guide = model->posterior_drift(context_for(seq, 0, y));
  std::vector<double> prior(4), post(4);
  model->prior().drift(y, 0.5, prior);
  guide(y, 0.5, post);
  for (std::size_t c = 0; c < 3; ++c) CHECK(post[c] == prior[c]);
  CHECK(post[3] > prior[3]);  // target above the predicted mean
}

TEST_CASE("MLP drift reproduces a numpy reference") {
  std::ifstream in(CTPF_TEST_DATA_DIR "/mlp_golden.json");
  REQUIRE(in);
  const nlohmann::json golden = nlohmann::json::parse(in);
  const MlpDrift drift = MlpDrift::from_json(golden.at("model"));
  CHECK(drift.widths() == std::vector<std::size_t>{3, 5, 4, 2});
  CHECK(drift.state_dim() == 2);
  for (const auto& c : golden.at("cases")) {
    const auto z = c.at("z").get<std::vector<double>>();
    const auto expected = c.at("out").get<std::vector<double>>();
    const std::vector<double> out = mlp_forward(drift, z, c.at("t").get<double>());
    REQUIRE(out.size() == 2);
    CHECK(out[0] == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(expected[1]).epsilon(1e-12));
  }
  const MlpDrift back = MlpDrift::from_json(drift.to_json());
  const std::vector<double> z = {0.3, -0.7};
  CHECK(mlp_forward(back, z, 1.25) == mlp_forward(drift, z, 1.25));
}

TEST_CASE("malformed MLP weights are rejected") {
  using nlohmann::json;
  CHECK_THROWS_AS(MlpDrift::from_json(json::object()), ArgumentError);
  const json ragged = {{"layers", {{{"W", {{1.0, 2.0}, {3.0}}}, {"b", {0.0, 0.0}}}}}};
  CHECK_THROWS_AS(MlpDrift::from_json(ragged), ArgumentError);
  const json good = {{"layers", {{{"W", {{1.0, 2.0}}}, {"b", {0.0}}}}}};
  CHECK_NOTHROW(MlpDrift::from_json(good));
  json wrong_widths = good;
  wrong_widths["widths"] = {3, 1};
  CHECK_THROWS_AS(MlpDrift::from_json(wrong_widths), ArgumentError);
  const json bad_bias = {{"layers", {{{"W", {{1.0, 2.0}}}, {"b", {0.0, 1.0}}}}}};
  CHECK_THROWS_AS(MlpDrift::from_json(bad_bias), ArgumentError);
  // Input must be the state plus time.
  const json no_time = {{"layers", {{{"W", {{1.0}}}, {"b", {0.0}}}}}};
  CHECK_THROWS_AS(MlpDrift::from_json(no_time), ArgumentError);
  CHECK_THROWS_AS(load_mlp_weights("/nonexistent/weights.json"), IoError);
}

TEST_CASE("MLP latent model checks its shapes") {
  const std::size_t widths[] = {3, 8, 2};
  const MlpDrift drift = MlpDrift::random(widths, 5);
  CHECK_NOTHROW(MlpLatentModel(drift, {0.1}, 1, 0.1, 1.0));
  CHECK_THROWS_AS(MlpLatentModel(drift, {0.1, 0.2, 0.3}, 1, 0.1, 1.0), ArgumentError);
  CHECK_THROWS_AS(MlpLatentModel(drift, {0.1}, 3, 0.1, 1.0), ArgumentError);
  const MlpLatentModel model(drift, {0.1, 0.2}, 1, 0.1, 1.0);
  CHECK(model.initial_state() == std::vector<double>{0.0, 0.0});
  std::vector<double> sigma(2);
  const std::vector<double> z = {0.0, 0.0};
  model.prior().diffusion(z, 0.0, sigma);
  CHECK(sigma == std::vector<double>{0.1, 0.2});
}
