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

#ifndef CTPF_LOG_WEIGHTS_HPP
#define CTPF_LOG_WEIGHTS_HPP

#include <span>

namespace ctpf {

/// log(sum(exp(x))) with a max shift; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> log_weights);

/// Subtracts log_sum_exp in place and returns it. Throws DegeneracyError if
/// every weight is zero.
double normalize_log_weights(std::span<double> log_weights);

/// Effective sample size (sum w)^2 / sum w^2 of unnormalized log weights.
/// Equal weights give exactly N. Throws DegeneracyError if every weight is
/// zero.
double effective_sample_size(std::span<const double> log_weights);

}  // namespace ctpf

#endif  // CTPF_LOG_WEIGHTS_HPP
