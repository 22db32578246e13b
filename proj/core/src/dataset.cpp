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

#include "ctpf/dataset.hpp"

#include <fstream>
#include <string>

#include "ctpf/errors.hpp"

namespace ctpf {

using nlohmann::json;

double Dataset::mean_length() const {
  if (sequences.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& s : sequences) total += static_cast<double>(s.size());
  return total / static_cast<double>(sequences.size());
}

Dataset simulate_dataset(const ProcessSpec& process, const SimulationConfig& config) {
  if (config.sequences == 0) {
    throw ArgumentError("number of sequences must be at least 1");
  }
  Dataset out{process, config, {}};
  out.sequences.reserve(config.sequences);
  for (std::size_t k = 0; k < config.sequences; ++k) {
    auto time_rng = make_stream(config.seed, StreamDomain::kObservationTimes, k);
    auto noise_rng = make_stream(config.seed, StreamDomain::kSimulation, k);
    const TimeGrid grid = sample_observation_times(config.intensity, config.horizon, time_rng);
    out.sequences.push_back(simulate(process, grid, config.dt, noise_rng));
  }
  return out;
}

json process_to_json(const ProcessSpec& process) {
  json params;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GbmParams>) {
          params = {{"mu", p.mu}, {"sigma", p.sigma}, {"x0", p.x0}};
        } else if constexpr (std::is_same_v<P, LsdeParams>) {
          params = {{"a_sin", p.a_sin},   {"a_const", p.a_const},
                    {"b_cos", p.b_cos},   {"b_const", p.b_const},
                    {"sigma_logistic", p.sigma_logistic}, {"sigma_const", p.sigma_const},
                    {"x0", p.x0}};
        } else if constexpr (std::is_same_v<P, Car4Params>) {
          params = {{"A", p.a}, {"e", p.e}, {"y0", p.y0}};
        } else {
          params = {{"sigma", p.sigma}, {"rho", p.rho}, {"beta", p.beta}, {"noise", p.noise}, {"x0", p.x0}};
        }
      },
      process.params());
  return {{"process", std::string(to_string(process.kind()))}, {"params", params}};
}

namespace {

template <class T>
void read_field(const json& params, const char* key, T& target) {
  if (params.contains(key)) {
    params.at(key).get_to(target);
  }
}

}  // namespace

ProcessSpec process_from_json(const json& j) {
  const ProcessKind kind = parse_process_kind(j.at("process").get<std::string>());
  const json params = j.value("params", json::object());
  switch (kind) {
    case ProcessKind::kGbm: {
      GbmParams p;
      read_field(params, "mu", p.mu);
      read_field(params, "sigma", p.sigma);
      read_field(params, "x0", p.x0);
      return ProcessSpec::gbm(p);
    }
    case ProcessKind::kLsde: {
      LsdeParams p;
      read_field(params, "a_sin", p.a_sin);
      read_field(params, "a_const", p.a_const);
      read_field(params, "b_cos", p.b_cos);
      read_field(params, "b_const", p.b_const);
      read_field(params, "sigma_logistic", p.sigma_logistic);
      read_field(params, "sigma_const", p.sigma_const);
      read_field(params, "x0", p.x0);
      return ProcessSpec::lsde(p);
    }
    case ProcessKind::kCar4: {
      Car4Params p;
      read_field(params, "A", p.a);
      read_field(params, "e", p.e);
      read_field(params, "y0", p.y0);
      return ProcessSpec::car4(p);
    }
    case ProcessKind::kSlc: {
      SlcParams p;
      read_field(params, "sigma", p.sigma);
      read_field(params, "rho", p.rho);
      read_field(params, "beta", p.beta);
      read_field(params, "noise", p.noise);
      read_field(params, "x0", p.x0);
      return ProcessSpec::slc(p);
    }
  }
  throw ArgumentError("unknown process kind");
}

json dataset_to_json(const Dataset& dataset) {
  json j = process_to_json(dataset.process);
  j["seed"] = dataset.config.seed;
  j["config"] = {{"intensity", dataset.config.intensity},
                 {"horizon", dataset.config.horizon},
                 {"dt_sim", dataset.config.dt},
                 {"sequences", dataset.sequences.size()}};
  json sequences = json::array();
  for (const auto& s : dataset.sequences) {
    sequences.push_back({{"times", std::vector<double>(s.grid.points().begin(), s.grid.points().end())},
                         {"values", s.values}});
  }
  j["sequences"] = std::move(sequences);
  return j;
}

Dataset dataset_from_json(const json& j) {
  try {
    Dataset out{process_from_json(j), {}, {}};
    out.config.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("config")) {
      const json& c = j.at("config");
      out.config.intensity = c.value("intensity", out.config.intensity);
      out.config.horizon = c.value("horizon", out.config.horizon);
      out.config.dt = c.value("dt_sim", out.config.dt);
    }
    for (const json& s : j.at("sequences")) {
      ObservationSequence seq;
      seq.grid = TimeGrid(s.at("times").get<std::vector<double>>());
      seq.values = s.at("values").get<std::vector<std::vector<double>>>();
      seq.validate(out.process.obs_dim());
      out.sequences.push_back(std::move(seq));
    }
    out.config.sequences = out.sequences.size();
    return out;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed dataset: ") + e.what());
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << dataset_to_json(dataset).dump() << '\n';
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open dataset '" + path.string() + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse dataset '" + path.string() + "': " + e.what());
  }
  return dataset_from_json(j);
}

}  // namespace ctpf
