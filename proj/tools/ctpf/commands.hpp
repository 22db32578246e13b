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

#ifndef CTPF_TOOLS_COMMANDS_HPP
#define CTPF_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace ctpf::cli {

/// Every setting of every subcommand. Field names double as config-file keys
/// and (with '_' -> '-') as flag names.
struct RunConfig {
  // Simulation.
  std::string process = "gbm";
  double lambda = 2.0;
  double horizon = 30.0;
  double dt_sim = 1e-4;
  std::uint64_t sequences = 100;
  std::uint64_t seed = 0;
  // Files.
  std::string dataset;
  std::string output;
  // Filtering.
  std::uint64_t limit = 0;  // first `limit` sequences; 0 = all
  std::uint64_t particles = 125;
  double dt = 1e-3;
  double tau = 0.5;
  std::string scheme = "systematic";
  bool resample = true;
  bool compare = false;
  std::uint64_t seeds = 1;
  double sigma_floor = 1e-6;
  double u_max = 1e4;
  // Model: "oracle" or "mlp:<weights.json>".
  std::string model = "oracle";
  double emission_std = 1e-2;
  double guidance_gain = 1.0;
  double diffusion = 0.1;  // MLP models only
  // Prediction and diagnostics.
  std::string method = "pf";  // pf | posterior | both
  std::uint64_t inner_samples = 1;
  std::uint64_t sequence = 0;
  // Not part of the resolved config: results do not depend on it.
  std::uint64_t threads = 0;  // 0 = CTPF_THREADS or 1

  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Rejects unknown keys and mistyped values.
void merge_json(RunConfig& config, const nlohmann::json& json);
RunConfig load_config_file(const std::string& path);

int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_loglik(const RunConfig& config, std::ostream& out);
int cmd_predict(const RunConfig& config, std::ostream& out);
int cmd_diagnose(const RunConfig& config, std::ostream& out);
/// `sigma_floor_override` is a test hook replacing the solver floor of the
/// guard check.
int cmd_selftest(const RunConfig& config, std::ostream& out, std::optional<double> sigma_floor_override);

}  // namespace ctpf::cli

#endif  // CTPF_TOOLS_COMMANDS_HPP
