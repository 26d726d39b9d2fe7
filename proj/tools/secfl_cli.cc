//
// Copyright 2026 The secfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// secfl command-line tool: simulate, sweep, accountant, validate-bench.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secfl/errors.h"
#include "secfl/experiment.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> variant;
  std::optional<size_t> runs;
  std::optional<long> rounds;
  std::optional<int> threads;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "first seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--variant", f.variant, "precad | ldp | nonprivate")
      ->check(CLI::IsMember({"precad", "ldp", "nonprivate"}));
  cmd->add_option("--runs", f.runs, "number of seeds");
  cmd->add_option("--rounds", f.rounds, "training rounds T");
  cmd->add_option("--threads", f.threads, "worker threads");
}

secfl::ExperimentConfig ResolveConfig(const RunFlags& f) {
  secfl::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = secfl::LoadExperimentConfig(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.variant) cfg.variant = secfl::ParseVariant(*f.variant);
  if (f.runs) cfg.runs = *f.runs;
  if (f.rounds) cfg.round.T = *f.rounds;
  if (f.threads) cfg.threads = *f.threads;
  secfl::ValidateExperimentConfig(cfg);
  return cfg;
}

int Simulate(const RunFlags& f) {
  const secfl::ExperimentConfig cfg = ResolveConfig(f);
  const std::filesystem::path out = cfg.out_dir;
  const secfl::ExperimentResult r = secfl::RunExperiment(cfg, out);
  for (const secfl::MetricsRow& row : r.mean) {
    std::cout << secfl::MetricsRowToJson(row, secfl::VariantName(cfg.variant),
                                         std::nullopt)
              << "\n";
  }
  return kExitOk;
}

struct SweepFlags {
  std::string axis;
  std::vector<double> values;
  std::vector<double> n, K, C, sigma;
};

int RunSweep(const RunFlags& f, const SweepFlags& s) {
  const secfl::ExperimentConfig cfg = ResolveConfig(f);
  std::vector<std::pair<secfl::SweepAxis, std::vector<double>>> picked;
  if (!s.axis.empty()) {
    picked.emplace_back(secfl::ParseSweepAxis(s.axis), s.values);
  }
  if (!s.n.empty()) picked.emplace_back(secfl::SweepAxis::kN, s.n);
  if (!s.K.empty()) picked.emplace_back(secfl::SweepAxis::kK, s.K);
  if (!s.C.empty()) picked.emplace_back(secfl::SweepAxis::kC, s.C);
  if (!s.sigma.empty()) {
    picked.emplace_back(secfl::SweepAxis::kSigma, s.sigma);
  }
  if (picked.size() != 1) {
    throw secfl::ConfigError(
        "sweep", "give exactly one axis (--axis/--values or --n/--K/--C/--sigma)");
  }
  const auto& [axis, values] = picked.front();
  const std::filesystem::path out = cfg.out_dir;
  const std::vector<secfl::SweepRow> rows =
      secfl::Sweep(cfg, axis, values, out);
  std::cout << secfl::SweepCsvHeader();
  for (const secfl::SweepRow& row : rows) {
    std::cout << secfl::SweepCsvRow(axis, cfg.variant, row);
  }
  return kExitOk;
}

struct AccountantFlags {
  std::string config;
  std::optional<double> q, p_i, sigma, R, C, delta, T_i;
  std::optional<long> T;
  double L = 0.5;
  double B = 1.0;
  std::optional<int> K;
};

int Accountant(const AccountantFlags& f) {
  secfl::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = secfl::LoadExperimentConfig(f.config);
  secfl::AccountantQuery query;
  secfl::PrivacyParams& p = query.params;
  p.q = f.q.value_or(cfg.round.q);
  p.p_i = f.p_i.value_or(cfg.population.p_i);
  p.T = f.T.value_or(cfg.round.T);
  p.T_i = f.T_i;
  p.sigma = f.sigma.value_or(cfg.round.sigma);
  p.R = f.R.value_or(cfg.round.R);
  p.C = f.C.value_or(cfg.round.C);
  query.delta = f.delta.value_or(cfg.delta);
  query.L = f.L;
  query.B = f.B;
  query.K = f.K.value_or(static_cast<int>(cfg.population.K));
  secfl::AccountantAnswer answer;
  try {
    answer = secfl::RunAccountant(query);
  } catch (const secfl::DomainError& e) {
    throw secfl::ConfigError("accountant", e.what());
  }
  std::cout << secfl::AccountantAnswerToJson(answer) << "\n";
  return kExitOk;
}

struct BenchFlags {
  std::vector<size_t> dims = {16, 64, 256, 1024};
  size_t iters = 200;
  double C = 30.0;
  uint64_t seed = 1;
  std::string out;
};

int Bench(const BenchFlags& f) {
  const std::vector<secfl::BenchRow> rows =
      secfl::ValidateBench(f.dims, f.iters, f.C, f.seed);
  std::string text = "d,mean_ms,verdict_error_count\n";
  for (const secfl::BenchRow& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%zu\n", r.d, r.mean_ms,
                  r.verdict_error_count);
    text += buf;
  }
  std::cout << text;
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    std::FILE* fp =
        std::fopen((std::filesystem::path(f.out) / "bench.csv").c_str(), "w");
    if (fp == nullptr) throw std::runtime_error("cannot write bench.csv");
    std::fputs(text.c_str(), fp);
    std::fclose(fp);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-server private and robust federated learning simulator"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "run one experiment");
  AddRunFlags(sim, sim_flags);

  RunFlags sweep_flags;
  SweepFlags sweep_axis;
  CLI::App* sweep = app.add_subcommand("sweep", "run a one-axis sweep");
  AddRunFlags(sweep, sweep_flags);
  sweep->add_option("--axis", sweep_axis.axis, "n | K | C | sigma");
  sweep->add_option("--values", sweep_axis.values, "axis values")
      ->delimiter(',');
  sweep->add_option("--n", sweep_axis.n, "values for n")->delimiter(',');
  sweep->add_option("--K", sweep_axis.K, "values for K")->delimiter(',');
  sweep->add_option("--C", sweep_axis.C, "values for C")->delimiter(',');
  sweep->add_option("--sigma", sweep_axis.sigma, "values for sigma")
      ->delimiter(',');

  AccountantFlags acc_flags;
  CLI::App* acc = app.add_subcommand(
      "accountant", "privacy and robustness numbers as JSON");
  acc->add_option("--config", acc_flags.config, "JSON experiment config")
      ->check(CLI::ExistingFile);
  acc->add_option("--q", acc_flags.q, "client selection probability");
  acc->add_option("--p-i", acc_flags.p_i, "record sampling probability");
  acc->add_option("--T", acc_flags.T, "rounds");
  acc->add_option("--T-i", acc_flags.T_i,
                  "realized participation (default q*T)");
  acc->add_option("--sigma", acc_flags.sigma, "noise multiplier");
  acc->add_option("--R", acc_flags.R, "record clip norm");
  acc->add_option("--C", acc_flags.C, "client clip norm");
  acc->add_option("--delta", acc_flags.delta, "target delta");
  acc->add_option("--L", acc_flags.L, "clean expected loss");
  acc->add_option("--B", acc_flags.B, "loss bound");
  acc->add_option("--K", acc_flags.K, "malicious clients");

  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand(
      "validate-bench", "time secure validation per dimension");
  bench->add_option("--dims", bench_flags.dims, "dimensions")
      ->delimiter(',');
  bench->add_option("--iters", bench_flags.iters, "validations per dimension");
  bench->add_option("--C", bench_flags.C, "norm bound");
  bench->add_option("--seed", bench_flags.seed, "seed");
  bench->add_option("--out", bench_flags.out, "also write bench.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return Simulate(sim_flags);
    if (*sweep) return RunSweep(sweep_flags, sweep_axis);
    if (*acc) return Accountant(acc_flags);
    if (*bench) return Bench(bench_flags);
  } catch (const secfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
