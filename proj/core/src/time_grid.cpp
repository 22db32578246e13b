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

#include "ctpf/time_grid.hpp"

#include <cmath>
#include <string>

#include "ctpf/errors.hpp"

namespace ctpf {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  double previous = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double t = points_[i];
    if (!std::isfinite(t) || t <= previous) {
      throw ArgumentError("time grid point " + std::to_string(i) + " is not finite and strictly increasing from 0");
    }
    previous = t;
  }
}

std::vector<double> TimeGrid::intervals() const {
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    out[i] = points_[i] - interval_start(i);
  }
  return out;
}

TimeGrid TimeGrid::prefix(std::size_t count) const {
  if (count > points_.size()) {
    throw ArgumentError("prefix longer than the grid");
  }
  TimeGrid out;
  out.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

}  // namespace ctpf
