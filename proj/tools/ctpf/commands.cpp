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

#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <vector>

#include "ctpf/dataset.hpp"
#include "ctpf/errors.hpp"
#include "ctpf/inference.hpp"
#include "ctpf/latent_model.hpp"
#include "ctpf/log_weights.hpp"
#include "ctpf/mlp.hpp"
#include "ctpf/particle_filter.hpp"
#include "ctpf/random.hpp"
#include "ctpf/report_io.hpp"
#include "ctpf/resampling.hpp"
#include "ctpf/thread_pool.hpp"

namespace ctpf::cli {
namespace {

using nlohmann::json;

template <class Config, class F>
void for_each_field(Config& c, F&& f) {
  f("process", c.process);
  f("lambda", c.lambda);
  f("horizon", c.horizon);
  f("dt_sim", c.dt_sim);
  f("sequences", c.sequences);
  f("seed", c.seed);
  f("dataset", c.dataset);
  f("output", c.output);
  f("limit", c.limit);
  f("particles", c.particles);
  f("dt", c.dt);
  f("tau", c.tau);
  f("scheme", c.scheme);
  f("resample", c.resample);
  f("compare", c.compare);
  f("seeds", c.seeds);
  f("sigma_floor", c.sigma_floor);
  f("u_max", c.u_max);
  f("model", c.model);
  f("emission_std", c.emission_std);
  f("guidance_gain", c.guidance_gain);
  f("diffusion", c.diffusion);
  f("method", c.method);
  f("inner_samples", c.inner_samples);
  f("sequence", c.sequence);
}

void assign(const std::string& key, const json& value, std::string& field) {
  if (!value.is_string()) throw ArgumentError("config key '" + key + "' must be a string");
  field = value.get<std::string>();
}
void assign(const std::string& key, const json& value, double& field) {
  if (!value.is_number()) throw ArgumentError("config key '" + key + "' must be a number");
  field = value.get<double>();
}
void assign(const std::string& key, const json& value, std::uint64_t& field) {
  if (!value.is_number_unsigned()) throw ArgumentError("config key '" + key + "' must be a non-negative integer");
  field = value.get<std::uint64_t>();
}
void assign(const std::string& key, const json& value, bool& field) {
  if (!value.is_boolean()) throw ArgumentError("config key '" + key + "' must be true or false");
  field = value.get<bool>();
}

void require_positive(double value, const char* name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw ArgumentError(std::string(name) + " must be finite and positive");
  }
}

std::string fixed(double value, int digits = 6) {
  if (!std::isfinite(value)) return format_double(value);
  char buffer[64];
  const auto r = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, digits);
  return {buffer, r.ptr};
}

std::size_t resolved_threads(const RunConfig& c) {
  return c.threads > 0 ? c.threads : threads_from_environment(1);
}

json header(const RunConfig& c, const char* command) {
  json j = to_json(c);
  j["command"] = command;
  return j;
}

Dataset load_dataset(const RunConfig& c) {
  if (c.dataset.empty()) throw ArgumentError("--dataset is required");
  Dataset data = read_dataset(c.dataset);
  if (data.sequences.empty()) throw ArgumentError("dataset has no sequences");
  if (c.limit > 0 && c.limit < data.sequences.size()) {
    data.sequences.resize(c.limit);
    data.config.sequences = c.limit;
  }
  return data;
}

std::unique_ptr<LatentSdeModel> build_model(const RunConfig& c, const ProcessSpec& process) {
  if (c.model == "oracle") {
    return oracle_model(process, c.emission_std, c.guidance_gain);
  }
  if (c.model.rfind("mlp:", 0) == 0) {
    MlpDrift drift = load_mlp_weights(c.model.substr(4));
    return std::make_unique<MlpLatentModel>(std::move(drift), std::vector<double>{c.diffusion}, process.obs_dim(),
                                            c.emission_std, c.guidance_gain);
  }
  throw ArgumentError("unknown model '" + c.model + "' (expected oracle or mlp:<weights.json>)");
}

EvalConfig eval_config(const RunConfig& c) {
  EvalConfig e;
  e.filter.particles = c.particles;
  e.filter.dt = c.dt;
  e.filter.policy.threshold_fraction = c.tau;
  e.filter.policy.scheme = parse_resample_scheme(c.scheme);
  e.filter.policy.enabled = c.resample;
  e.filter.solver.sigma_floor = c.sigma_floor;
  e.filter.solver.u_max = c.u_max;
  e.seed = c.seed;
  e.seeds = c.seeds;
  e.inner_samples = c.inner_samples;
  e.threads = resolved_threads(c);
  return e;
}

void print_report(std::ostream& out, const EvalReport& r) {
  out << r.task << ' ' << r.method << ": mean " << fixed(r.mean) << " stderr " << fixed(r.standard_error)
      << " sequences " << r.sequences.size() << " failures " << r.failures << '\n';
  for (const SequenceMetric& s : r.sequences) {
    if (s.failed) out << "  failed: " << s.error << '\n';
  }
}

void write_reports(const RunConfig& c, const char* command, const std::vector<EvalReport>& reports) {
  if (c.output.empty()) return;
  const json head = header(c, command);
  json all = {{"config", head}, {"reports", json::array()}};
  std::vector<SummaryRow> rows;
  for (const EvalReport& r : reports) {
    all["reports"].push_back(report_to_json(r));
    rows.push_back(summary_row(r));
  }
  write_json_file(c.output + ".json", all);
  write_summary_csv(std::filesystem::path(c.output + ".csv"), rows, head);
}

// One SelfTest check: prints a PASS/FAIL line and returns whether it passed.
bool report_check(std::ostream& out, const char* name, bool ok, const std::string& detail) {
  out << (ok ? "PASS " : "FAIL ") << name << ' ' << detail << '\n';
  return ok;
}

}  // namespace

void RunConfig::validate() const {
  parse_process_kind(process);
  require_positive(lambda, "lambda");
  require_positive(horizon, "horizon");
  require_positive(dt_sim, "dt_sim");
  require_positive(dt, "dt");
  require_positive(emission_std, "emission_std");
  require_positive(diffusion, "diffusion");
  require_positive(u_max, "u_max");
  if (sequences == 0) throw ArgumentError("sequences must be at least 1");
  if (particles == 0) throw ArgumentError("particles must be at least 1");
  if (seeds == 0) throw ArgumentError("seeds must be at least 1");
  if (inner_samples == 0) throw ArgumentError("inner_samples must be at least 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("tau must be in (0, 1]");
  if (!(std::isfinite(guidance_gain) && guidance_gain >= 0.0)) {
    throw ArgumentError("guidance_gain must be finite and non-negative");
  }
  if (!(std::isfinite(sigma_floor) && sigma_floor >= 0.0)) {
    throw ArgumentError("sigma_floor must be finite and non-negative");
  }
  parse_resample_scheme(scheme);
  if (method != "pf" && method != "posterior" && method != "both") {
    throw ArgumentError("method must be pf, posterior or both");
  }
}

json to_json(const RunConfig& config) {
  json j = json::object();
  for_each_field(config, [&](const char* key, const auto& value) { j[key] = value; });
  return j;
}

void merge_json(RunConfig& config, const json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") continue;
    bool found = false;
    for_each_field(config, [&](const char* name, auto& field) {
      if (key == name) {
        assign(key, value, field);
        found = true;
      }
    });
    if (!found) throw ArgumentError("unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError("cannot parse config '" + path + "': " + e.what());
  }
  RunConfig config;
  merge_json(config, j);
  return config;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) throw ArgumentError("--output is required");
  SimulationConfig sim;
  sim.intensity = c.lambda;
  sim.horizon = c.horizon;
  sim.dt = c.dt_sim;
  sim.sequences = c.sequences;
  sim.seed = c.seed;
  const Dataset data = simulate_dataset(ProcessSpec::make(parse_process_kind(c.process)), sim);
  write_dataset(c.output, data);
  out << "wrote " << data.sequences.size() << " sequences to " << c.output << ": mean length "
      << fixed(data.mean_length(), 3) << ", lambda*T " << fixed(c.lambda * c.horizon, 3) << '\n';
  return 0;
}

int cmd_loglik(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_dataset(c);
  const auto model = build_model(c, data.process);
  EvalConfig e = eval_config(c);
  std::vector<EvalReport> reports;
  if (c.compare) {
    e.filter.policy.enabled = true;
    reports.push_back(estimate_nll(*model, data, e));
    e.filter.policy.enabled = false;
    reports.push_back(estimate_nll(*model, data, e));
  } else {
    reports.push_back(estimate_nll(*model, data, e));
  }
  for (const EvalReport& r : reports) print_report(out, r);
  write_reports(c, "loglik", reports);
  return 0;
}

int cmd_predict(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_dataset(c);
  const auto model = build_model(c, data.process);
  const EvalConfig e = eval_config(c);
  std::vector<PredictionMethod> methods;
  if (c.method == "both") {
    methods = {PredictionMethod::kParticleFilter, PredictionMethod::kPosterior};
  } else {
    methods = {parse_prediction_method(c.method)};
  }
  std::vector<EvalReport> reports;
  for (PredictionMethod m : methods) reports.push_back(sequential_prediction_eval(*model, data, e, m));
  for (const EvalReport& r : reports) print_report(out, r);
  write_reports(c, "predict", reports);
  return 0;
}

int cmd_diagnose(const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) throw ArgumentError("--output is required");
  const Dataset data = load_dataset(c);
  if (c.sequence >= data.sequences.size()) {
    throw ArgumentError("sequence index " + std::to_string(c.sequence) + " out of range");
  }
  const auto model = build_model(c, data.process);
  EvalConfig e = eval_config(c);
  e.filter.record_genealogy = true;
  ThreadPool pool(e.threads);
  const ObservationSequence& seq = data.sequences[c.sequence];
  const std::uint64_t seed = filter_seed(c.seed, sequence_key(seq), 0);
  const json head = header(c, "diagnose");

  e.filter.policy.enabled = true;
  const FilterResult pf = run_filter(*model, seq, e.filter, seed, &pool);
  const FilterResult sis = run_sis(*model, seq, e.filter, seed, &pool);
  write_genealogy_csv(std::filesystem::path(c.output + "_pf.csv"), pf.genealogy, head);
  write_genealogy_csv(std::filesystem::path(c.output + "_sis.csv"), sis.genealogy, head);

  std::size_t resamples = 0;
  for (const StepRecord& s : pf.steps) resamples += s.resampled ? 1 : 0;
  out << "sequence " << c.sequence << ": " << seq.size() << " steps, " << resamples << " resampling events\n";
  out << "pf log-likelihood " << fixed(pf.total_log_likelihood) << ", final ESS " << fixed(pf.steps.back().ess_before, 3)
      << '\n';
  out << "sis log-likelihood " << fixed(sis.total_log_likelihood) << ", final ESS "
      << fixed(sis.steps.back().ess_before, 3) << '\n';
  return 0;
}

int cmd_selftest(const RunConfig& c, std::ostream& out, std::optional<double> sigma_floor_override) {
  bool all = true;
  const ProcessSpec gbm = ProcessSpec::gbm();
  const auto guided = oracle_model(gbm, 0.2, 1.0);

  {
    // Girsanov weights of a bounded guided proposal average to one.
    const std::size_t paths = 4000;
    const ObservationSequence target{TimeGrid({1.0}), {{1.25}}};
    const std::vector<double> z0{1.0};
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < paths; ++k) {
      auto rng = make_stream(c.seed, StreamDomain::kSelfTest, 0, k);
      const WienerSegment seg = sample_wiener_segment(1.0, 1e-2, 1, rng);
      ProposalContext ctx{0.0, 1.0, z0, &target, 0, true};
      const double m = std::exp(augmented_solve(guided->prior(), guided->posterior_drift(ctx), z0, 0.0, seg).log_m);
      sum += m;
      sum_sq += m * m;
    }
    const double mean = sum / paths;
    const double se = std::sqrt((sum_sq / paths - mean * mean) / (paths - 1));
    all &= report_check(out, "martingale", std::abs(mean - 1.0) <= 4.0 * se,
                        "mean " + fixed(mean) + " stderr " + fixed(se));
  }
  {
    const std::vector<double> equal(125, -std::log(125.0));
    std::vector<double> one_hot(125, -std::numeric_limits<double>::infinity());
    one_hot[17] = 0.0;
    std::vector<double> skewed(125);
    for (std::size_t j = 0; j < skewed.size(); ++j) skewed[j] = -0.05 * static_cast<double>(j);
    normalize_log_weights(skewed);
    ParticleSet set(125, std::vector<double>{1.0});
    std::copy(skewed.begin(), skewed.end(), set.log_weights().begin());
    auto rng = make_stream(c.seed, StreamDomain::kSelfTest, 1);
    resample(set, ResampleScheme::kSystematic, rng);
    const double a = effective_sample_size(equal);
    const double b = effective_sample_size(one_hot);
    const double after = effective_sample_size(set.log_weights());
    all &= report_check(out, "ess-identities", a == 125.0 && b == 1.0 && after == 125.0,
                        "equal " + fixed(a, 3) + " one-hot " + fixed(b, 3) + " after-resample " + fixed(after, 3));
  }
  {
    // Substeps tile the interval and segment totals are N(0, duration).
    const std::size_t draws = 4000;
    const double duration = 0.7;
    double sum = 0.0;
    double sum_sq = 0.0;
    bool consistent = true;
    for (std::size_t k = 0; k < draws; ++k) {
      auto rng = make_stream(c.seed, StreamDomain::kSelfTest, 2, k);
      const WienerSegment seg = sample_wiener_segment(duration, 0.1, 1, rng);
      double covered = 0.0;
      for (std::size_t s = 0; s < seg.substeps(); ++s) covered += seg.substep_length(s);
      consistent &= std::abs(covered - duration) <= 1e-12;
      sum += seg.total()[0];
      sum_sq += seg.total()[0] * seg.total()[0];
    }
    const double mean = sum / draws;
    const double var = sum_sq / draws - mean * mean;
    const double var_se = duration * std::sqrt(2.0 / draws);
    all &= report_check(out, "wiener-law",
                        consistent && std::abs(mean) <= 4.0 * std::sqrt(duration / draws) &&
                            std::abs(var - duration) <= 4.0 * var_se,
                        "mean " + fixed(mean) + " variance " + fixed(var));
  }
  {
    SimulationConfig sim;
    sim.horizon = 5.0;
    sim.sequences = 1;
    sim.dt = 1e-3;
    sim.seed = c.seed;
    const Dataset data = simulate_dataset(gbm, sim);
    FilterConfig f;
    f.particles = 32;
    f.dt = 1e-2;
    f.policy.enabled = false;
    const FilterResult pf = run_filter(*guided, data.sequences[0], f, c.seed);
    const FilterResult sis = run_sis(*guided, data.sequences[0], f, c.seed);
    all &= report_check(out, "sis-equals-pf-without-resampling",
                        pf.total_log_likelihood == sis.total_log_likelihood && pf.rng_draws == sis.rng_draws,
                        "loglik " + format_double(pf.total_log_likelihood) + " draws " + std::to_string(pf.rng_draws));
  }
  {
    // Guided GBM proposal started at the absorbing state z = 0, where the
    // diffusion vanishes; only the sigma floor keeps the weight finite.
    SolverOptions options;
    options.sigma_floor = sigma_floor_override.value_or(options.sigma_floor);
    const ObservationSequence target{TimeGrid({1.0}), {{1.5}}};
    const std::vector<double> z0{0.0};
    auto rng = make_stream(c.seed, StreamDomain::kSelfTest, 3);
    const WienerSegment seg = sample_wiener_segment(1.0, 1e-2, 1, rng);
    ProposalContext ctx{0.0, 1.0, z0, &target, 0, true};
    const double log_m = augmented_solve(guided->prior(), guided->posterior_drift(ctx), z0, 0.0, seg, options).log_m;
    all &= report_check(out, "sigma-floor-guard", std::isfinite(log_m), "log_m " + format_double(log_m));
  }
  out << (all ? "selftest passed" : "selftest FAILED") << '\n';
  return all ? 0 : 1;
}

}  // namespace ctpf::cli
