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

#ifndef CTPF_TIME_GRID_HPP
#define CTPF_TIME_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ctpf {

/// Observation times t_1 < ... < t_n, all in (0, T]; the origin t_0 = 0 is
/// implicit.
class TimeGrid {
 public:
  TimeGrid() = default;

  /// Throws ArgumentError unless the points are finite, positive and strictly
  /// increasing.
  explicit TimeGrid(std::vector<double> points);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double back() const { return points_.back(); }

  /// Start of interval i, i.e. t_{i-1} with t_{-1} = 0 for the first point.
  double interval_start(std::size_t i) const { return i == 0 ? 0.0 : points_[i - 1]; }

  /// Consecutive differences t_i - t_{i-1}, starting from the origin.
  std::vector<double> intervals() const;

  /// Grid made of the first `count` points.
  TimeGrid prefix(std::size_t count) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::vector<double> points_;
};

}  // namespace ctpf

#endif  // CTPF_TIME_GRID_HPP
