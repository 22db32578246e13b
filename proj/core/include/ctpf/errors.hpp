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

#ifndef CTPF_ERRORS_HPP
#define CTPF_ERRORS_HPP

#include <cstddef>
#include <exception>
#include <string>
#include <string_view>

namespace ctpf {

/// Base class of every error raised by the library.
///
/// Errors can be annotated while they unwind (e.g. with the particle or
/// sequence index that failed) through add_context().
class Error : public std::exception {
 public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }

  /// Prepends `context: ` to the message.
  void add_context(std::string_view context);

 private:
  std::string message_;
};

/// Invalid arguments or configuration (CLI exit code 2).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Values outside the domain of a density or transform.
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// File system and serialization failures (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: divergence, proposal explosion, weight degeneracy
/// (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state produced during integration.
class DivergenceError : public NumericalError {
 public:
  explicit DivergenceError(double time);

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Girsanov integrand exceeded the per-component bound (or became NaN).
class ProposalExplosionError : public NumericalError {
 public:
  ProposalExplosionError(double time, std::size_t component, double value);

  double time() const noexcept { return time_; }
  std::size_t component() const noexcept { return component_; }
  double value() const noexcept { return value_; }

 private:
  double time_;
  std::size_t component_;
  double value_;
};

/// Every importance weight is zero.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ctpf

#endif  // CTPF_ERRORS_HPP
