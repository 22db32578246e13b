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


#ifndef CTPF_TESTS_UNIT_HELPERS_HPP
#define CTPF_TESTS_UNIT_HELPERS_HPP

#include <cmath>
#include <numeric>
#include <vector>

#include "ctpf/process.hpp"

namespace ctpf::testing {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double standard_error(const std::vector<double>& v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

inline ObservationSequence make_sequence(std::vector<double> times, const std::vector<double>& values) {
  ObservationSequence seq{TimeGrid(std::move(times)), {}};
  for (double v : values) seq.values.push_back({v});
  return seq;
}

// Ornstein-Uhlenbeck special case of the LSDE: dX = (a X + b) dt + s dW.
inline LsdeParams constant_lsde(double a, double b, double s, double x0 = 0.0) {
  LsdeParams p;
  p.a_sin = 0.0;
  p.a_const = a;
  p.b_cos = 0.0;
  p.b_const = b;
  p.sigma_logistic = 0.0;
  p.sigma_const = s;
  p.x0 = x0;
  return p;
}

}  // namespace ctpf::testing

#endif  // CTPF_TESTS_UNIT_HELPERS_HPP
