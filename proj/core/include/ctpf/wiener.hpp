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

#ifndef CTPF_WIENER_HPP
#define CTPF_WIENER_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ctpf/errors.hpp"

namespace ctpf {

/// Brownian increments on the sub-grid of one inter-observation interval.
///
/// The interval of length `duration` is split into ceil(duration / dt)
/// substeps of length dt; the last substep absorbs the remainder. Increments
/// are stored (not cumulative values) so particles copied by resampling can
/// share a segment.
class WienerSegment {
 public:
  WienerSegment() = default;

  /// Builds a segment from explicit increments (substep-major, `dim` values
  /// per substep). Throws ArgumentError if the count does not match.
  WienerSegment(double duration, double dt, std::size_t dim, std::vector<double> increments);

  /// Segment with all increments equal to zero.
  static WienerSegment zeros(double duration, double dt, std::size_t dim);

  /// Number of substeps for an interval, ceil(duration / dt) with a relative
  /// guard against round-off (e.g. 1.0 / 0.1 does not produce 11 steps).
  static std::size_t substep_count(double duration, double dt);

  double duration() const noexcept { return duration_; }
  double dt() const noexcept { return dt_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t substeps() const noexcept { return substeps_; }

  /// Length of substep k; every substep but the last equals dt.
  double substep_length(std::size_t k) const noexcept {
    return k + 1 < substeps_ ? dt_ : last_length_;
  }

  std::span<const double> increment(std::size_t k) const noexcept {
    return {increments_.data() + k * dim_, dim_};
  }

  std::span<const double> increments() const noexcept { return increments_; }

  /// Sum of the increments, i.e. W at the end of the segment.
  std::vector<double> total() const;

 private:
  double duration_ = 0.0;
  double dt_ = 0.0;
  double last_length_ = 0.0;
  std::size_t dim_ = 0;
  std::size_t substeps_ = 0;
  std::vector<double> increments_;
};

namespace detail {
void validate_segment_arguments(double duration, double dt, std::size_t dim);
}  // namespace detail

/// Samples independent N(0, h I) increments for every substep of length h.
template <class Generator>
WienerSegment sample_wiener_segment(double duration, double dt, std::size_t dim, Generator& rng) {
  detail::validate_segment_arguments(duration, dt, dim);
  const std::size_t steps = WienerSegment::substep_count(duration, dt);
  const double last = duration - static_cast<double>(steps - 1) * dt;
  std::vector<double> increments(steps * dim);
  std::normal_distribution<double> normal;
  const double scale = std::sqrt(dt);
  const double last_scale = std::sqrt(last);
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = k + 1 < steps ? scale : last_scale;
    for (std::size_t c = 0; c < dim; ++c) {
      increments[k * dim + c] = s * normal(rng);
    }
  }
  return WienerSegment(duration, dt, dim, std::move(increments));
}

}  // namespace ctpf

#endif  // CTPF_WIENER_HPP
