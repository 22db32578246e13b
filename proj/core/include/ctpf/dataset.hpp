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

#ifndef CTPF_DATASET_HPP
#define CTPF_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctpf/process.hpp"

namespace ctpf {

struct SimulationConfig {
  double intensity = 2.0;
  double horizon = 30.0;
  double dt = 1e-4;
  std::size_t sequences = 100;
  std::uint64_t seed = 0;
};

/// A set of sequences simulated from one process.
struct Dataset {
  ProcessSpec process = ProcessSpec::gbm();
  SimulationConfig config;
  std::vector<ObservationSequence> sequences;

  /// Mean number of observations per sequence.
  double mean_length() const;
};

/// Sequence k draws its observation times and its Wiener increments from
/// independent streams keyed by (seed, k), so datasets are reproducible and
/// any prefix of a larger dataset equals the smaller dataset.
Dataset simulate_dataset(const ProcessSpec& process, const SimulationConfig& config);

nlohmann::json process_to_json(const ProcessSpec& process);
ProcessSpec process_from_json(const nlohmann::json& json);

/// {process, params, seed, config, sequences: [{times, values}]}.
nlohmann::json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& json);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace ctpf

#endif  // CTPF_DATASET_HPP
