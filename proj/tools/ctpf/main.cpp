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

// ctpf: simulate datasets, estimate likelihoods, evaluate one-step-ahead
// prediction and export particle genealogies.

#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ctpf/errors.hpp"

namespace {

using ctpf::cli::RunConfig;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Flags given on the command line, applied on top of the config file.
struct Overrides {
  std::string config_path;
  std::vector<std::function<void(json&)>> apply;
};

template <class T>
void option(CLI::App* app, Overrides& o, const std::string& key, const std::string& help) {
  auto storage = std::make_shared<T>();
  std::string flag = "--" + key;
  for (char& ch : flag) ch = ch == '_' ? '-' : ch;
  CLI::Option* opt = app->add_option(flag, *storage, help);
  o.apply.push_back([storage, opt, key](json& j) {
    if (opt->count() > 0) j[key] = *storage;
  });
}

void flag(CLI::App* app, Overrides& o, const std::string& name, const std::string& key, bool value,
          const std::string& help) {
  CLI::Option* opt = app->add_flag(name, help);
  o.apply.push_back([opt, key, value](json& j) {
    if (opt->count() > 0) j[key] = value;
  });
}

void common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON config file; flags override its values");
  option<std::uint64_t>(app, o, "seed", "master seed");
  option<std::uint64_t>(app, o, "threads", "worker threads (default: CTPF_THREADS or 1)");
  option<std::string>(app, o, "output", "output path or prefix");
}

void filtering(CLI::App* app, Overrides& o) {
  option<std::string>(app, o, "dataset", "dataset JSON");
  option<std::uint64_t>(app, o, "limit", "use only the first N sequences (0 = all)");
  option<std::uint64_t>(app, o, "particles", "number of particles");
  option<double>(app, o, "dt", "filter step size");
  option<double>(app, o, "tau", "resample when ESS < tau * N");
  option<std::string>(app, o, "scheme", "systematic | multinomial");
  option<std::uint64_t>(app, o, "seeds", "filter runs per sequence");
  option<double>(app, o, "sigma_floor", "diffusion floor in the weight computation");
  option<double>(app, o, "u_max", "bound on the Girsanov integrand");
  option<std::string>(app, o, "model", "oracle | mlp:<weights.json>");
  option<double>(app, o, "emission_std", "observation noise standard deviation");
  option<double>(app, o, "guidance_gain", "strength of the guided proposal (0 = bootstrap)");
  option<double>(app, o, "diffusion", "diffusion of MLP models");
  flag(app, o, "--no-resample", "resample", false, "disable resampling (SIS)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig config = o.config_path.empty() ? RunConfig{} : ctpf::cli::load_config_file(o.config_path);
  json flags = json::object();
  for (const auto& apply : o.apply) apply(flags);
  if (flags.contains("threads")) {
    config.threads = flags["threads"].get<std::uint64_t>();
    flags.erase("threads");
  }
  ctpf::cli::merge_json(config, flags);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time particle filtering for latent SDE models"};
  app.require_subcommand(1);

  Overrides simulate_o, loglik_o, predict_o, diagnose_o, selftest_o;

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a dataset of irregularly observed sequences");
  common(simulate, simulate_o);
  option<std::string>(simulate, simulate_o, "process", "gbm | lsde | car | slc");
  option<double>(simulate, simulate_o, "lambda", "Poisson intensity of observation times");
  option<double>(simulate, simulate_o, "horizon", "time horizon");
  option<double>(simulate, simulate_o, "dt_sim", "simulation step size");
  option<std::uint64_t>(simulate, simulate_o, "sequences", "number of sequences");

  CLI::App* loglik = app.add_subcommand("loglik", "estimate per-observation negative log-likelihood");
  common(loglik, loglik_o);
  filtering(loglik, loglik_o);
  flag(loglik, loglik_o, "--compare", "compare", true, "run both PF and SIS");

  CLI::App* predict = app.add_subcommand("predict", "evaluate one-step-ahead prediction error");
  common(predict, predict_o);
  filtering(predict, predict_o);
  option<std::string>(predict, predict_o, "method", "pf | posterior | both");
  option<std::uint64_t>(predict, predict_o, "inner_samples", "prior samples per particle");

  CLI::App* diagnose = app.add_subcommand("diagnose", "export PF and SIS particle genealogies of one sequence");
  common(diagnose, diagnose_o);
  filtering(diagnose, diagnose_o);
  option<std::uint64_t>(diagnose, diagnose_o, "sequence", "sequence index");

  CLI::App* selftest = app.add_subcommand("selftest", "run fast invariant checks");
  common(selftest, selftest_o);
  std::optional<double> sigma_floor_hook;
  selftest->add_option("--inject-sigma-floor", sigma_floor_hook)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (simulate->parsed()) return ctpf::cli::cmd_simulate(resolve(simulate_o), std::cout);
    if (loglik->parsed()) return ctpf::cli::cmd_loglik(resolve(loglik_o), std::cout);
    if (predict->parsed()) return ctpf::cli::cmd_predict(resolve(predict_o), std::cout);
    if (diagnose->parsed()) return ctpf::cli::cmd_diagnose(resolve(diagnose_o), std::cout);
    if (selftest->parsed()) return ctpf::cli::cmd_selftest(resolve(selftest_o), std::cout, sigma_floor_hook);
  } catch (const ctpf::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ctpf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ctpf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
