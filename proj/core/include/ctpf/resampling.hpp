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

#ifndef CTPF_RESAMPLING_HPP
#define CTPF_RESAMPLING_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ctpf/random.hpp"

namespace ctpf {

enum class ResampleScheme { kMultinomial, kSystematic };

std::string_view to_string(ResampleScheme scheme);
ResampleScheme parse_resample_scheme(std::string_view name);

/// Draws `count` ancestor indices from the categorical distribution given by
/// (unnormalized) log weights.
///
/// Multinomial: i.i.d. inverse-CDF draws. Systematic: positions (k + U) / count
/// for a single uniform U, assigned by walking the cumulative sum in index
/// order. Weights are max-shifted before exponentiation, so equal weights give
/// exactly one copy of each particle under the systematic scheme.
std::vector<std::size_t> resample_indices(std::span<const double> log_weights, std::size_t count,
                                          ResampleScheme scheme, Philox4x32& rng);

}  // namespace ctpf

#endif  // CTPF_RESAMPLING_HPP
