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
#include <limits>
#include <numeric>
#include <vector>

#include "ctpf/errors.hpp"
#include "ctpf/log_weights.hpp"
#include "ctpf/random.hpp"
#include "ctpf/resampling.hpp"
#include "doctest.h"

using namespace ctpf;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log-sum-exp is stable for large magnitudes") {
  const std::vector<double> big = {1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  const std::vector<double> small = {-1000.0, -1001.0};
  CHECK(log_sum_exp(small) == doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-15));
  const std::vector<double> with_zero = {-kInf, 0.0};
  CHECK(log_sum_exp(with_zero) == 0.0);
  const std::vector<double> all_zero = {-kInf, -kInf};
  CHECK(log_sum_exp(all_zero) == -kInf);
  CHECK(log_sum_exp({}) == -kInf);
}

TEST_CASE("normalization returns the log normalizer and leaves weights summing to one") {
  std::vector<double> lw = {std::log(1.0), std::log(3.0), -kInf, std::log(4.0)};
  const double lse = normalize_log_weights(lw);
  CHECK(lse == doctest::Approx(std::log(8.0)).epsilon(1e-15));
  CHECK(std::exp(lw[1]) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(lw[2] == -kInf);
  CHECK(log_sum_exp(lw) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> huge = {-1e6, -1e6 + 1.0};
  normalize_log_weights(huge);
  CHECK(std::abs(log_sum_exp(huge)) < 1e-14);

  std::vector<double> dead = {-kInf, -kInf};
  CHECK_THROWS_AS(normalize_log_weights(dead), DegeneracyError);
  std::vector<double> nan = {0.0, std::nan("")};
  CHECK_THROWS_AS(normalize_log_weights(nan), DegeneracyError);
}

TEST_CASE("effective sample size identities") {
  const std::vector<double> uniform(50, -3.7);
  CHECK(effective_sample_size(uniform) == doctest::Approx(50.0).epsilon(1e-13));
  std::vector<double> single(50, -kInf);
  single[17] = 2.0;
  CHECK(effective_sample_size(single) == doctest::Approx(1.0).epsilon(1e-15));
  // Weights 1, 1, 2: (4)^2 / 6.
  const std::vector<double> mixed = {0.0, 0.0, std::log(2.0)};
  CHECK(effective_sample_size(mixed) == doctest::Approx(16.0 / 6.0).epsilon(1e-14));
  const std::vector<double> shifted = {500.0, 500.0, 500.0 + std::log(2.0)};
  CHECK(effective_sample_size(shifted) == doctest::Approx(16.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("resampling schemes parse") {
  CHECK(parse_resample_scheme("Systematic") == ResampleScheme::kSystematic);
  CHECK(parse_resample_scheme("multinomial") == ResampleScheme::kMultinomial);
  CHECK(to_string(ResampleScheme::kMultinomial) == "multinomial");
  CHECK_THROWS_AS(parse_resample_scheme("stratified"), ArgumentError);
}

TEST_CASE("systematic resampling under uniform weights keeps every particle once") {
  const std::vector<double> lw(64, 0.0);
  for (std::uint64_t s = 0; s < 200; ++s) {
    Philox4x32 rng(s, 3);
    const auto idx = resample_indices(lw, 64, ResampleScheme::kSystematic, rng);
    std::vector<std::size_t> expected(64);
    std::iota(expected.begin(), expected.end(), 0);
    REQUIRE(idx == expected);
  }
}

TEST_CASE("systematic copy counts are the floor or ceiling of N w") {
  const std::vector<double> w = {0.05, 0.3, 0.0, 0.15, 0.5};
  std::vector<double> lw;
  for (double x : w) lw.push_back(std::log(x));
  for (std::uint64_t s = 0; s < 500; ++s) {
    Philox4x32 rng(s, 4);
    const auto idx = resample_indices(lw, 10, ResampleScheme::kSystematic, rng);
    std::vector<int> counts(w.size(), 0);
    for (std::size_t j : idx) ++counts[j];
    for (std::size_t j = 0; j < w.size(); ++j) {
      REQUIRE(counts[j] >= static_cast<int>(std::floor(10.0 * w[j] - 1e-9)));
      REQUIRE(counts[j] <= static_cast<int>(std::ceil(10.0 * w[j] + 1e-9)));
    }
    REQUIRE(counts[2] == 0);
  }
}

TEST_CASE("multinomial copy counts have mean N w") {
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> lw;
  for (double x : w) lw.push_back(std::log(x) + 12.0);
  const int trials = 10000;
  const std::size_t n = 20;
  std::vector<double> sum(w.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    Philox4x32 rng(static_cast<std::uint64_t>(t), 5);
    for (std::size_t j : resample_indices(lw, n, ResampleScheme::kMultinomial, rng)) sum[j] += 1.0;
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double expected = n * w[j];
    const double se = std::sqrt(n * w[j] * (1.0 - w[j]) / trials);
    CHECK(std::abs(sum[j] / trials - expected) < 3.0 * se);
  }
}

TEST_CASE("resampling rejects empty or dead weight vectors") {
  Philox4x32 rng(1, 1);
  CHECK_THROWS_AS(resample_indices({}, 3, ResampleScheme::kSystematic, rng), ArgumentError);
  const std::vector<double> dead(3, -kInf);
  CHECK_THROWS_AS(resample_indices(dead, 3, ResampleScheme::kMultinomial, rng), DegeneracyError);
}

TEST_CASE("NaN log weights are rejected wherever they sit") {
  Philox4x32 rng(1, 1);
  for (std::size_t pos = 0; pos < 3; ++pos) {
    std::vector<double> lw = {0.0, -1.0, -2.0};
    lw[pos] = std::nan("");
    CHECK_THROWS_AS(effective_sample_size(lw), DegeneracyError);
    CHECK_THROWS_AS(resample_indices(lw, 3, ResampleScheme::kSystematic, rng), DegeneracyError);
    CHECK(std::isnan(log_sum_exp(lw)));
    CHECK_THROWS_AS(normalize_log_weights(lw), DegeneracyError);
  }
}
