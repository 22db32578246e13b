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

#include "ctpf/errors.hpp"

#include <cmath>

#include <sstream>

namespace ctpf {

void Error::add_context(std::string_view context) {
  message_ = std::string(context) + ": " + message_;
}

namespace {

std::string format_time(double time) {
  std::ostringstream out;
  out.precision(17);
  out << time;
  return out.str();
}

}  // namespace

DivergenceError::DivergenceError(double time)
    : NumericalError("non-finite state during integration at t=" + format_time(time)), time_(time) {}

ProposalExplosionError::ProposalExplosionError(double time, std::size_t component, double value)
    : NumericalError("proposal explosion: u[" + std::to_string(component) + "] = " + format_time(value) +
                     (std::isnan(value) ? " is not a number" : " exceeds the bound") + " at t=" + format_time(time)),
      time_(time),
      component_(component),
      value_(value) {}

}  // namespace ctpf
