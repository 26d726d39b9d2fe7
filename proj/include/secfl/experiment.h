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

// Experiment configuration, population construction and the runners behind
// the command-line tool.

#ifndef SECFL_EXPERIMENT_H_
#define SECFL_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secfl/accountant.h"
#include "secfl/learn.h"
#include "secfl/protocol.h"

namespace secfl {

struct PopulationSpec {
  size_t n = 50;
  size_t per_client = 100;
  size_t shards_per_client = 2;
  size_t K = 0;  // malicious clients
  double p_i = 0.05;
  size_t test_size = 1000;
  // Optional flat numeric file, label in the last column. Replaces the
  // synthetic task when set.
  std::string dataset_path;
};

struct ModelSpec {
  Arch arch = Arch::kLogistic;
  size_t hidden = 16;
};

struct ExperimentConfig {
  Variant variant = Variant::kPrecad;
  PopulationSpec population;
  TaskSpec task;
  ModelSpec model;
  RoundConfig round;
  AttackSpec attack;
  bool attack_trigger_default = true;  // trigger on the dead features
  double delta = 1e-5;
  uint64_t modulus = kMersenne61;
  int scale_bits = FixedPointCodec::kDefaultScaleBits;
  uint64_t seed = 1;
  size_t runs = 1;  // seeds are seed, seed + 1, ...
  long eval_every = 10;
  int threads = 1;
  bool write_transcripts = true;
  bool record_wall_time = false;
  std::string out_dir = "out";

  std::vector<uint64_t> Seeds() const;
};

// Parses a JSON document on top of the defaults. Unknown keys and bad values
// raise ConfigError naming the offending field path.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
std::string ExperimentConfigToJson(const ExperimentConfig& cfg);

// Cross-field checks (dimensions, K below the benign count, field headroom
// n * C * 2^f < p / 2). Throws ConfigError.
void ValidateExperimentConfig(const ExperimentConfig& cfg);

struct World {
  Population population;
  Dataset clean_test;
  Dataset triggered_test;
  Model initial;
  Trigger trigger;
};

// Data, clients, test sets and initial model for one seed.
World BuildWorld(const ExperimentConfig& cfg, uint64_t seed);

TrainConfig MakeTrainConfig(const ExperimentConfig& cfg, const World& world,
                            uint64_t seed);

struct RunOutput {
  uint64_t seed = 0;
  TrainResult result;
};

struct ExperimentResult {
  std::vector<RunOutput> runs;
  std::vector<MetricsRow> mean;
};

// Element-wise mean of equally shaped histories.
std::vector<MetricsRow> MeanHistory(
    const std::vector<std::vector<MetricsRow>>& histories);

// Runs every seed. When `out` is set, writes run_seed_<s>.jsonl per seed,
// mean.jsonl, config.json and (optionally) transcripts/seed_<s>.jsonl.
ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const std::optional<std::filesystem::path>& out);

std::string MetricsRowToJson(const MetricsRow& row, std::string_view variant,
                             std::optional<uint64_t> seed);

enum class SweepAxis { kN, kK, kC, kSigma };
std::string_view SweepAxisName(SweepAxis axis);
SweepAxis ParseSweepAxis(std::string_view name);
void ApplySweepValue(ExperimentConfig& cfg, SweepAxis axis, double value);

// One mean metrics row of one sweep point.
struct SweepRow {
  double value = 0.0;
  MetricsRow mean;
};

// One experiment per value; every mean row, merged in value order. Writes
// sweep.csv (and per-point run files under <out>/<axis>_<value>/) when `out`
// is set.
std::vector<SweepRow> Sweep(const ExperimentConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::optional<std::filesystem::path>& out);

std::string SweepCsvHeader();
std::string SweepCsvRow(SweepAxis axis, Variant variant, const SweepRow& row);

struct BenchRow {
  size_t d = 0;
  double mean_ms = 0.0;
  size_t verdict_error_count = 0;
};

// Times secure validation on `iters` random vectors per dimension, with norms
// spread around C, and counts disagreements with the plaintext predicate.
std::vector<BenchRow> ValidateBench(const std::vector<size_t>& dims,
                                    size_t iters, double C, uint64_t seed);

struct AccountantQuery {
  PrivacyParams params;
  double delta = 1e-5;
  // Robustness inputs: clean expected loss, loss bound, attackers.
  double L = 0.5;
  double B = 1.0;
  int K = 1;
};

struct AccountantAnswer {
  double mu_server = 0.0;
  double mu_client = 0.0;
  double eps_server = 0.0;
  double eps_client = 0.0;
  double robust_lower = 0.0;
  double robust_upper = 0.0;
};

// Record-level epsilons for both corruption cases and client-level
// robustness bounds. Throws DomainError on invalid parameters.
AccountantAnswer RunAccountant(const AccountantQuery& query);
std::string AccountantAnswerToJson(const AccountantAnswer& answer);

}  // namespace secfl

#endif  // SECFL_EXPERIMENT_H_
