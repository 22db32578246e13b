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

#include "ctpf/wiener.hpp"

#include <algorithm>
#include <string>

namespace ctpf {

namespace detail {

void validate_segment_arguments(double duration, double dt, std::size_t dim) {
  if (!(std::isfinite(duration) && duration > 0.0)) {
    throw ArgumentError("segment duration must be finite and positive");
  }
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw ArgumentError("segment dt must be finite and positive");
  }
  if (dim == 0) {
    throw ArgumentError("segment dimension must be at least 1");
  }
}

}  // namespace detail

std::size_t WienerSegment::substep_count(double duration, double dt) {
  const double ratio = duration / dt;
  const auto steps = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  return std::max<std::size_t>(steps, 1);
}

WienerSegment::WienerSegment(double duration, double dt, std::size_t dim, std::vector<double> increments)
    : duration_(duration), dt_(dt), dim_(dim), increments_(std::move(increments)) {
  detail::validate_segment_arguments(duration, dt, dim);
  substeps_ = substep_count(duration, dt);
  last_length_ = duration - static_cast<double>(substeps_ - 1) * dt;
  if (increments_.size() != substeps_ * dim_) {
    throw ArgumentError("segment expects " + std::to_string(substeps_ * dim_) + " increments, got " +
                        std::to_string(increments_.size()));
  }
}

WienerSegment WienerSegment::zeros(double duration, double dt, std::size_t dim) {
  detail::validate_segment_arguments(duration, dt, dim);
  return WienerSegment(duration, dt, dim, std::vector<double>(substep_count(duration, dt) * dim, 0.0));
}

std::vector<double> WienerSegment::total() const {
  std::vector<double> sum(dim_, 0.0);
  for (std::size_t k = 0; k < substeps_; ++k) {
    for (std::size_t c = 0; c < dim_; ++c) {
      sum[c] += increments_[k * dim_ + c];
    }
  }
  return sum;
}

}  // namespace ctpf
