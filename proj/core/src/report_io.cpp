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

#include "ctpf/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ctpf/errors.hpp"

namespace ctpf {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return {buffer, result.ptr};
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json sequences = nlohmann::json::array();
  for (const SequenceMetric& s : report.sequences) {
    nlohmann::json entry = {{"sequence", s.sequence},
                            {"observations", s.observations},
                            {"per_seed", s.per_seed},
                            {"value", s.value},
                            {"failed", s.failed}};
    if (s.failed) entry["error"] = s.error;
    sequences.push_back(std::move(entry));
  }
  return {{"task", report.task},
          {"method", report.method},
          {"mean", report.mean},
          {"stderr", report.standard_error},
          {"failures", report.failures},
          {"seed_means", report.seed_means},
          {"config", report.config},
          {"sequences", std::move(sequences)}};
}

SummaryRow summary_row(const EvalReport& report) {
  const nlohmann::json& c = report.config;
  return {c.value("process", std::string{}),
          c.value("lambda", 0.0),
          report.method,
          c.value("particles", std::size_t{0}),
          report.mean,
          report.standard_error,
          c.value("seeds", std::size_t{0})};
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, const nlohmann::json& config) {
  out << "# config: " << config.dump() << '\n';
  out << "process,lambda,method,N,metric_mean,metric_stderr,seeds\n";
  for (const SummaryRow& r : rows) {
    out << r.process << ',' << format_double(r.lambda) << ',' << r.method << ',' << r.particles << ','
        << format_double(r.metric_mean) << ',' << format_double(r.metric_stderr) << ',' << r.seeds << '\n';
  }
}

void write_genealogy_csv(std::ostream& out, std::span<const GenealogyRow> rows, const nlohmann::json& config) {
  out << "# config: " << config.dump() << '\n';
  out << "step,t_i,particle_id,ancestor_id,log_weight,ess,resampled\n";
  for (const GenealogyRow& r : rows) {
    out << r.step << ',' << format_double(r.t) << ',' << r.particle << ',' << r.ancestor << ','
        << format_double(r.log_weight) << ',' << format_double(r.ess) << ',' << (r.resampled ? "true" : "false")
        << '\n';
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& json) {
  std::ofstream out = open_output(path);
  out << json.dump(2) << '\n';
  finish(out, path);
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                       const nlohmann::json& config) {
  std::ofstream out = open_output(path);
  write_summary_csv(out, rows, config);
  finish(out, path);
}

void write_genealogy_csv(const std::filesystem::path& path, std::span<const GenealogyRow> rows,
                         const nlohmann::json& config) {
  std::ofstream out = open_output(path);
  write_genealogy_csv(out, rows, config);
  finish(out, path);
}

}  // namespace ctpf
