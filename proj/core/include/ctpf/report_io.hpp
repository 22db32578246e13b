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

#ifndef CTPF_REPORT_IO_HPP
#define CTPF_REPORT_IO_HPP

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctpf/inference.hpp"
#include "ctpf/particle_filter.hpp"

namespace ctpf {

/// 17 significant digits, enough for an exact round trip.
/// Locale independent; NaN and infinities print as nan, inf, -inf.
std::string format_double(double value);

nlohmann::json report_to_json(const EvalReport& report);

struct SummaryRow {
  std::string process;
  double lambda = 0.0;
  std::string method;
  std::size_t particles = 0;
  double metric_mean = 0.0;
  double metric_stderr = 0.0;
  std::size_t seeds = 0;
};

SummaryRow summary_row(const EvalReport& report);

/// CSV starting with a `# config: <json>` line.
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, const nlohmann::json& config);
void write_genealogy_csv(std::ostream& out, std::span<const GenealogyRow> rows, const nlohmann::json& config);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& json);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                       const nlohmann::json& config);
void write_genealogy_csv(const std::filesystem::path& path, std::span<const GenealogyRow> rows,
                         const nlohmann::json& config);

}  // namespace ctpf

#endif  // CTPF_REPORT_IO_HPP
