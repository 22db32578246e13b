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

#include "ctpf/log_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctpf/errors.hpp"

namespace ctpf {

namespace {

double max_finite_or_throw(std::span<const double> log_weights) {
  double max = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    // max_element would skip a NaN that is not in front.
    if (std::isnan(lw)) {
      throw DegeneracyError("NaN log weight");
    }
    max = std::max(max, lw);
  }
  if (!std::isfinite(max)) {
    throw DegeneracyError("all particle weights are zero");
  }
  return max;
}

}  // namespace

double log_sum_exp(std::span<const double> log_weights) {
  if (log_weights.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  double max = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw)) {
      return lw;
    }
    max = std::max(max, lw);
  }
  if (!std::isfinite(max)) {
    return max;
  }
  double sum = 0.0;
  for (double lw : log_weights) sum += std::exp(lw - max);
  return max + std::log(sum);
}

double normalize_log_weights(std::span<double> log_weights) {
  const double max = max_finite_or_throw(log_weights);
  double sum = 0.0;
  for (double& lw : log_weights) {
    lw -= max;
    sum += std::exp(lw);
  }
  // Shifting by the max first keeps the result exact for huge magnitudes.
  const double log_sum = std::log(sum);
  for (double& lw : log_weights) lw -= log_sum;
  return max + log_sum;
}

double effective_sample_size(std::span<const double> log_weights) {
  const double max = max_finite_or_throw(log_weights);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - max);
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

}  // namespace ctpf
