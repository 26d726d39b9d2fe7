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

#include "secfl/experiment.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "secfl/errors.h"

namespace secfl {
namespace {

namespace fs = std::filesystem;

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::path(SECFL_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

ExperimentConfig SmallConfig() {
  ExperimentConfig cfg;
  cfg.population.n = 8;
  cfg.population.per_client = 30;
  cfg.population.test_size = 200;
  cfg.round.q = 0.5;
  cfg.round.T = 12;
  cfg.eval_every = 4;
  return cfg;
}

std::string ErrorPath(const std::string& json_text) {
  try {
    ValidateExperimentConfig(ParseExperimentConfig(json_text));
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

TEST(ConfigTest, EmptyDocumentGivesDefaults) {
  const ExperimentConfig cfg = ParseExperimentConfig("{}");
  const ExperimentConfig def;
  EXPECT_EQ(cfg.variant, Variant::kPrecad);
  EXPECT_EQ(cfg.population.n, def.population.n);
  EXPECT_EQ(cfg.round.C, def.round.C);
  EXPECT_EQ(cfg.round.sigma, def.round.sigma);
  EXPECT_EQ(cfg.modulus, kMersenne61);
  EXPECT_EQ(cfg.scale_bits, 16);
  EXPECT_NO_THROW(ValidateExperimentConfig(cfg));
}

TEST(ConfigTest, OverridesAreApplied) {
  const ExperimentConfig cfg = ParseExperimentConfig(R"({
    "variant": "ldp", "seed": 9, "runs": 3,
    "population": {"n": 20, "K": 2},
    "round": {"sigma": 0.5, "C": 4, "ldp_post_clip": true},
    "attack": {"trigger_features": [1, 2], "target_label": 3},
    "model": {"arch": "mlp1", "hidden": 8}
  })");
  EXPECT_EQ(cfg.variant, Variant::kLdp);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.Seeds(), (std::vector<uint64_t>{9, 10, 11}));
  EXPECT_EQ(cfg.population.n, 20u);
  EXPECT_EQ(cfg.population.K, 2u);
  EXPECT_EQ(cfg.round.sigma, 0.5);
  EXPECT_TRUE(cfg.round.ldp_post_clip);
  EXPECT_FALSE(cfg.attack_trigger_default);
  EXPECT_EQ(cfg.attack.trigger.features, (std::vector<size_t>{1, 2}));
  EXPECT_EQ(cfg.model.arch, Arch::kMlp1);
  EXPECT_EQ(cfg.model.hidden, 8u);
}

TEST(ConfigTest, ErrorsNameTheField) {
  EXPECT_EQ(ErrorPath(R"({"round": {"sigmaa": 1}})"), "round.sigmaa");
  EXPECT_EQ(ErrorPath(R"({"bogus": 1})"), "bogus");
  EXPECT_EQ(ErrorPath(R"({"round": {"C": "big"}})"), "round.C");
  EXPECT_EQ(ErrorPath(R"({"population": {"n": -3}})"), "population.n");
  EXPECT_EQ(ErrorPath(R"({"population": {"n": 2.5}})"), "population.n");
  EXPECT_EQ(ErrorPath(R"({"variant": "fedsgd"})"), "variant");
  EXPECT_EQ(ErrorPath(R"({"round": {"q": 0}})"), "round.q");
  EXPECT_EQ(ErrorPath(R"({"round": {"sigma": -1}})"), "round.sigma");
  EXPECT_EQ(ErrorPath(R"({"population": {"n": 10, "K": 5}})"),
            "population.K");
  EXPECT_EQ(ErrorPath(R"({"round": {"C": 1e13}})"), "round.C");
  EXPECT_EQ(ErrorPath(R"({"field": {"modulus": 1000}})"), "field.modulus");
  EXPECT_EQ(ErrorPath(R"({"model": {"arch": "cnn"}})"), "model.arch");
  EXPECT_EQ(ErrorPath(R"({"attack": {"trigger_features": [99]}})"),
            "attack.trigger_features");
  EXPECT_EQ(ErrorPath("[1, 2"), "<document>");
  EXPECT_EQ(ErrorPath("{}"), "");
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig cfg = SmallConfig();
  cfg.variant = Variant::kNonPrivate;
  cfg.round.sigma = 0.25;
  cfg.attack.lr = 0.7;
  cfg.delta = 1e-6;
  const ExperimentConfig back =
      ParseExperimentConfig(ExperimentConfigToJson(cfg));
  EXPECT_EQ(ExperimentConfigToJson(back), ExperimentConfigToJson(cfg));
  EXPECT_EQ(back.variant, Variant::kNonPrivate);
  EXPECT_EQ(back.round.sigma, 0.25);
  EXPECT_EQ(back.delta, 1e-6);
}

TEST(ConfigTest, MissingFileIsConfigError) {
  EXPECT_THROW(LoadExperimentConfig("/nonexistent/cfg.json"), ConfigError);
}

TEST(WorldTest, PopulationShape) {
  ExperimentConfig cfg = SmallConfig();
  cfg.population.K = 2;
  const World w = BuildWorld(cfg, 4);
  ASSERT_EQ(w.population.size(), 8u);
  EXPECT_EQ(w.population.NumMalicious(), 2u);
  EXPECT_TRUE(IsMalicious(w.population.clients[0].kind));
  EXPECT_FALSE(w.population.clients[0].poisoned.empty());
  EXPECT_EQ(w.population.clients[5].kind, ClientKind::kBenign);
  EXPECT_EQ(w.clean_test.size(), 200u);
  EXPECT_EQ(w.trigger.features.size(),
            cfg.task.num_features - cfg.task.informative);
  for (const Record& r : w.triggered_test.records) {
    EXPECT_EQ(r.label, cfg.attack.target_label);
  }
  const World again = BuildWorld(cfg, 4);
  EXPECT_EQ(again.clean_test.records[7].features,
            w.clean_test.records[7].features);
}

TEST(ExperimentTest, TenSeedsWriteTenRunFilesAndAMean) {
  ExperimentConfig cfg = SmallConfig();
  cfg.runs = 10;
  cfg.threads = 4;
  const fs::path dir = FreshDir("ten_seeds");
  const ExperimentResult r = RunExperiment(cfg, dir);
  ASSERT_EQ(r.runs.size(), 10u);
  for (uint64_t s = 1; s <= 10; ++s) {
    const fs::path run = dir / ("run_seed_" + std::to_string(s) + ".jsonl");
    ASSERT_TRUE(fs::exists(run)) << run;
    EXPECT_EQ(Lines(Slurp(run)).size(), 3u);
    EXPECT_TRUE(
        fs::exists(dir / "transcripts" / ("seed_" + std::to_string(s) + ".jsonl")));
  }
  EXPECT_EQ(Lines(Slurp(dir / "mean.jsonl")).size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "config.json"));

  double sum = 0.0;
  for (const RunOutput& run : r.runs) sum += run.result.history.back().main_acc;
  EXPECT_NEAR(r.mean.back().main_acc, sum / 10.0, 1e-12);

  // Same seeds with one thread give the same numbers.
  cfg.threads = 1;
  const ExperimentResult s = RunExperiment(cfg, std::nullopt);
  for (size_t k = 0; k < r.mean.size(); ++k) {
    EXPECT_EQ(r.mean[k].main_acc, s.mean[k].main_acc);
    EXPECT_EQ(r.mean[k].backdoor_acc, s.mean[k].backdoor_acc);
  }
}

TEST(ExperimentTest, RowJsonFields) {
  MetricsRow row;
  row.round = 7;
  row.main_acc = 0.5;
  const std::string plain = MetricsRowToJson(row, "nonprivate", std::nullopt);
  EXPECT_NE(plain.find("\"eps_server\":null"), std::string::npos);
  EXPECT_EQ(plain.find("\"seed\""), std::string::npos);
  row.eps_server = 1.5;
  const std::string seeded = MetricsRowToJson(row, "precad", 3);
  EXPECT_NE(seeded.find("\"seed\":3"), std::string::npos);
  EXPECT_NE(seeded.find("\"eps_server\":1.5"), std::string::npos);
}

TEST(MeanHistoryTest, AveragesRowWise) {
  MetricsRow a, b;
  a.round = b.round = 10;
  a.main_acc = 0.2;
  b.main_acc = 0.6;
  a.max_t_i = 3;
  b.max_t_i = 5;
  const std::vector<MetricsRow> m = MeanHistory({{a}, {b}});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0].main_acc, 0.4);
  EXPECT_EQ(m[0].round, 10);
  EXPECT_TRUE(MeanHistory({}).empty());
}

TEST(SweepTest, SingleValueMatchesExperiment) {
  ExperimentConfig cfg = SmallConfig();
  cfg.runs = 2;
  const fs::path dir = FreshDir("sweep_single");
  const std::vector<SweepRow> rows = Sweep(cfg, SweepAxis::kSigma, {0.5}, dir);
  ExperimentConfig point = cfg;
  point.round.sigma = 0.5;
  const ExperimentResult direct = RunExperiment(point, std::nullopt);
  ASSERT_EQ(rows.size(), direct.mean.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].mean.main_acc, direct.mean[k].main_acc);
    EXPECT_EQ(rows[k].mean.eps_server, direct.mean[k].eps_server);
  }
  EXPECT_TRUE(fs::exists(dir / "sigma_0.5" / "mean.jsonl"));

  // The CSV parses back to the same numbers.
  const std::vector<std::string> lines = Lines(Slurp(dir / "sweep.csv"));
  ASSERT_EQ(lines.size(), rows.size() + 1);
  EXPECT_EQ(lines[0] + "\n", SweepCsvHeader());
  for (size_t k = 0; k < rows.size(); ++k) {
    std::vector<std::string> cells;
    std::stringstream ss(lines[k + 1]);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 13u);
    EXPECT_EQ(cells[0], "sigma");
    EXPECT_EQ(std::stod(cells[1]), 0.5);
    EXPECT_EQ(cells[2], "precad");
    EXPECT_EQ(std::stol(cells[3]), rows[k].mean.round);
    EXPECT_EQ(std::stod(cells[4]), rows[k].mean.main_acc);
    EXPECT_EQ(std::stod(cells[6]), rows[k].mean.eps_server);
  }
}

TEST(SweepTest, AxesAndErrors) {
  ExperimentConfig cfg = SmallConfig();
  ApplySweepValue(cfg, ParseSweepAxis("n"), 12);
  EXPECT_EQ(cfg.population.n, 12u);
  ApplySweepValue(cfg, ParseSweepAxis("K"), 2);
  EXPECT_EQ(cfg.population.K, 2u);
  ApplySweepValue(cfg, ParseSweepAxis("C"), 3.5);
  EXPECT_EQ(cfg.round.C, 3.5);
  EXPECT_THROW(ParseSweepAxis("eta"), ConfigError);
  EXPECT_THROW(ApplySweepValue(cfg, SweepAxis::kN, 2.5), ConfigError);
  EXPECT_THROW(Sweep(cfg, SweepAxis::kC, {}, std::nullopt), ConfigError);
  // A point that breaks K < n - K is rejected before anything runs.
  EXPECT_THROW(Sweep(SmallConfig(), SweepAxis::kK, {1, 6}, std::nullopt),
               ConfigError);
}

TEST(BenchTest, ReportsNoVerdictErrors) {
  const std::vector<BenchRow> rows = ValidateBench({4, 64}, 20, 5.0, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].d, 4u);
  EXPECT_EQ(rows[1].d, 64u);
  for (const BenchRow& r : rows) {
    EXPECT_EQ(r.verdict_error_count, 0u);
    EXPECT_GE(r.mean_ms, 0.0);
  }
  EXPECT_THROW(ValidateBench({4}, 0, 5.0, 3), ConfigError);
  EXPECT_THROW(ValidateBench({0}, 5, 5.0, 3), ConfigError);
}

TEST(AccountantQueryTest, MatchesDirectCalls) {
  AccountantQuery q;
  q.params.q = 0.2;
  q.params.p_i = 0.05;
  q.params.T = 500;
  q.params.sigma = 1.0;
  const AccountantAnswer a = RunAccountant(q);
  EXPECT_DOUBLE_EQ(a.mu_server,
                   MuRecordServerCorrupted(0.05, 100.0, 1.0).mu);
  EXPECT_DOUBLE_EQ(a.mu_client, MuRecordClientsOnly(0.2, 0.05, 500, 1.0).mu);
  EXPECT_DOUBLE_EQ(a.eps_server, EpsAtDelta(GdpMu(a.mu_server), 1e-5));
  EXPECT_LE(a.robust_lower, q.L);
  EXPECT_GE(a.robust_upper, q.L);
  const std::string j = AccountantAnswerToJson(a);
  for (const char* key : {"mu_server", "mu_client", "eps_server",
                          "eps_client", "robust_lower", "robust_upper"}) {
    EXPECT_NE(j.find(std::string("\"") + key + "\""), std::string::npos);
  }
  q.params.sigma = -1.0;
  EXPECT_THROW(RunAccountant(q), DomainError);
}

TEST(DatasetImportTest, FlatFileDrivesTheWorld) {
  const fs::path dir = FreshDir("import");
  const fs::path file = dir / "data.csv";
  {
    std::ofstream out(file);
    for (int i = 0; i < 300; ++i) {
      const int label = i % 5;
      for (int f = 0; f < 10; ++f) out << (f == label ? 2.0 : 0.1 * (i % 3)) << ",";
      out << label << "\n";
    }
  }
  ExperimentConfig cfg = SmallConfig();
  cfg.population.dataset_path = file.string();
  cfg.population.test_size = 60;
  const World w = BuildWorld(cfg, 1);
  EXPECT_EQ(w.clean_test.size(), 60u);
  EXPECT_EQ(w.initial.num_features, 10u);
  EXPECT_EQ(w.trigger.features, (std::vector<size_t>{9}));
  size_t total = 0;
  for (const Client& c : w.population.clients) total += c.data.size();
  EXPECT_EQ(total, 240u);
  EXPECT_NO_THROW(RunExperiment(cfg, std::nullopt));

  cfg.population.test_size = 400;
  EXPECT_THROW(BuildWorld(cfg, 1), ConfigError);
  cfg.population.dataset_path = (dir / "missing.csv").string();
  EXPECT_THROW(BuildWorld(cfg, 1), ConfigError);
}

}  // namespace
}  // namespace secfl
