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

#include "ctpf/resampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "ctpf/errors.hpp"

namespace ctpf {

std::string_view to_string(ResampleScheme scheme) {
  return scheme == ResampleScheme::kMultinomial ? "multinomial" : "systematic";
}

ResampleScheme parse_resample_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "multinomial") return ResampleScheme::kMultinomial;
  if (lower == "systematic") return ResampleScheme::kSystematic;
  throw ArgumentError("unknown resampling scheme '" + std::string(name) + "'");
}

std::vector<std::size_t> resample_indices(std::span<const double> log_weights, std::size_t count,
                                          ResampleScheme scheme, Philox4x32& rng) {
  if (log_weights.empty() || count == 0) {
    throw ArgumentError("resampling needs at least one particle");
  }
  if (std::any_of(log_weights.begin(), log_weights.end(), [](double lw) { return std::isnan(lw); })) {
    throw DegeneracyError("cannot resample: NaN log weight");
  }
  const double max = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(max)) {
    throw DegeneracyError("cannot resample: all particle weights are zero");
  }
  std::vector<double> cumulative(log_weights.size());
  double total = 0.0;
  for (std::size_t j = 0; j < log_weights.size(); ++j) {
    total += std::exp(log_weights[j] - max);
    cumulative[j] = total;
  }

  std::vector<std::size_t> out(count);
  const std::size_t last = log_weights.size() - 1;
  if (scheme == ResampleScheme::kMultinomial) {
    for (std::size_t k = 0; k < count; ++k) {
      const double position = uniform01(rng) * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), position);
      out[k] = std::min(static_cast<std::size_t>(it - cumulative.begin()), last);
    }
    return out;
  }

  const double offset = uniform01(rng);
  const double cell = total / static_cast<double>(count);
  std::size_t j = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double position = (static_cast<double>(k) + offset) * cell;
    while (j < last && cumulative[j] <= position) {
      ++j;
    }
    out[k] = j;
  }
  return out;
}

}  // namespace ctpf
