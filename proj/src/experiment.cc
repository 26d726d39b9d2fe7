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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "secfl/errors.h"
#include "secfl/mpc.h"
#include "secfl/parallel.h"
#include "secfl/rng.h"
#include "secfl/sharing.h"
#include "secfl/vecmath.h"

namespace secfl {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads fields of one JSON object and remembers which keys were consumed, so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(Where(""), "expected an object");
  }

  bool Has(const std::string& key) const { return obj_.contains(key); }

  const json* Child(const std::string& key) {
    if (!obj_.contains(key)) return nullptr;
    seen_.insert(key);
    return &obj_.at(key);
  }

  std::string Where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void Read(const std::string& key, double& out) {
    if (const json* v = Child(key)) {
      if (!v->is_number()) throw ConfigError(Where(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
    requires std::is_integral_v<Int>
  void Read(const std::string& key, Int& out) {
    if (const json* v = Child(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(Where(key), "expected an integer");
      }
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = static_cast<Int>(v->get<uint64_t>());
          return;
        }
        if (v->get<int64_t>() < 0) {
          throw ConfigError(Where(key), "must be non-negative");
        }
      }
      out = static_cast<Int>(v->get<int64_t>());
    }
  }

  void Read(const std::string& key, bool& out) {
    if (const json* v = Child(key)) {
      if (!v->is_boolean()) throw ConfigError(Where(key), "expected a boolean");
      out = v->get<bool>();
    }
  }

  void Read(const std::string& key, std::string& out) {
    if (const json* v = Child(key)) {
      if (!v->is_string()) throw ConfigError(Where(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void Finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(Where(key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void Require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

void ReadPopulation(ObjectReader r, PopulationSpec& p) {
  r.Read("n", p.n);
  r.Read("per_client", p.per_client);
  r.Read("shards_per_client", p.shards_per_client);
  r.Read("K", p.K);
  r.Read("p_i", p.p_i);
  r.Read("test_size", p.test_size);
  r.Read("dataset_path", p.dataset_path);
  r.Finish();
}

void ReadTask(ObjectReader r, TaskSpec& t) {
  r.Read("num_features", t.num_features);
  r.Read("informative", t.informative);
  r.Read("num_classes", t.num_classes);
  r.Read("separation", t.separation);
  r.Read("noise", t.noise);
  r.Read("dead_noise", t.dead_noise);
  r.Finish();
}

void ReadModel(ObjectReader r, ModelSpec& m) {
  std::string arch(ArchName(m.arch));
  r.Read("arch", arch);
  try {
    m.arch = ParseArch(arch);
  } catch (const UsageError& e) {
    throw ConfigError(r.Where("arch"), e.what());
  }
  r.Read("hidden", m.hidden);
  r.Finish();
}

void ReadRound(ObjectReader r, RoundConfig& c) {
  r.Read("q", c.q);
  r.Read("eta", c.eta);
  r.Read("sigma", c.sigma);
  r.Read("R", c.R);
  r.Read("C", c.C);
  r.Read("slack", c.slack);
  r.Read("T", c.T);
  r.Read("client_clipping", c.client_clipping);
  r.Read("validation", c.validation);
  r.Read("ldp_post_clip", c.ldp_post_clip);
  r.Finish();
}

void ReadAttack(ObjectReader r, ExperimentConfig& cfg) {
  AttackSpec& a = cfg.attack;
  if (const json* v = r.Child("trigger_features")) {
    if (!v->is_array()) {
      throw ConfigError(r.Where("trigger_features"), "expected an array");
    }
    a.trigger.features.clear();
    for (const json& f : *v) {
      if (!f.is_number_unsigned()) {
        throw ConfigError(r.Where("trigger_features"),
                          "expected non-negative integers");
      }
      a.trigger.features.push_back(f.get<size_t>());
    }
    cfg.attack_trigger_default = false;
  }
  r.Read("trigger_value", a.trigger.value);
  r.Read("target_label", a.target_label);
  r.Read("poison_fraction", a.poison_fraction);
  r.Read("local_iters", a.local_iters);
  r.Read("lr", a.lr);
  r.Read("single_shot", a.single_shot);
  r.Read("start_round", a.start_round);
  r.Read("respect_bound", a.respect_bound);
  r.Read("oversize_factor", a.oversize_factor);
  r.Finish();
}

std::string FormatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ShortValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

ordered_json NumberOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void Shuffle(std::vector<Record>& records, Rng& rng) {
  for (size_t i = records.size(); i > 1; --i) {
    std::swap(records[i - 1], records[rng.UniformBelow(i)]);
  }
}

size_t ToCount(double value, const std::string& path) {
  if (!(value >= 0.0) || value != std::floor(value) || value > 1e9) {
    throw ConfigError(path, "expected a non-negative integer, got " +
                                ShortValue(value));
  }
  return static_cast<size_t>(value);
}

}  // namespace

std::vector<uint64_t> ExperimentConfig::Seeds() const {
  std::vector<uint64_t> seeds(runs);
  for (size_t k = 0; k < runs; ++k) seeds[k] = seed + k;
  return seeds;
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  ExperimentConfig cfg;
  ObjectReader r(doc, "");
  std::string variant(VariantName(cfg.variant));
  r.Read("variant", variant);
  try {
    cfg.variant = ParseVariant(variant);
  } catch (const UsageError& e) {
    throw ConfigError("variant", e.what());
  }
  if (const json* v = r.Child("population")) {
    ReadPopulation(ObjectReader(*v, "population"), cfg.population);
  }
  if (const json* v = r.Child("task")) {
    ReadTask(ObjectReader(*v, "task"), cfg.task);
  }
  if (const json* v = r.Child("model")) {
    ReadModel(ObjectReader(*v, "model"), cfg.model);
  }
  if (const json* v = r.Child("round")) {
    ReadRound(ObjectReader(*v, "round"), cfg.round);
  }
  if (const json* v = r.Child("attack")) {
    ReadAttack(ObjectReader(*v, "attack"), cfg);
  }
  if (const json* v = r.Child("accountant")) {
    ObjectReader a(*v, "accountant");
    a.Read("delta", cfg.delta);
    a.Finish();
  }
  if (const json* v = r.Child("field")) {
    ObjectReader f(*v, "field");
    f.Read("modulus", cfg.modulus);
    f.Read("scale_bits", cfg.scale_bits);
    f.Finish();
  }
  r.Read("seed", cfg.seed);
  r.Read("runs", cfg.runs);
  r.Read("eval_every", cfg.eval_every);
  r.Read("threads", cfg.threads);
  r.Read("write_transcripts", cfg.write_transcripts);
  r.Read("record_wall_time", cfg.record_wall_time);
  r.Read("out_dir", cfg.out_dir);
  r.Finish();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str());
}

std::string ExperimentConfigToJson(const ExperimentConfig& cfg) {
  ordered_json j;
  j["variant"] = VariantName(cfg.variant);
  const PopulationSpec& p = cfg.population;
  j["population"] = {{"n", p.n},
                     {"per_client", p.per_client},
                     {"shards_per_client", p.shards_per_client},
                     {"K", p.K},
                     {"p_i", p.p_i},
                     {"test_size", p.test_size},
                     {"dataset_path", p.dataset_path}};
  const TaskSpec& t = cfg.task;
  j["task"] = {{"num_features", t.num_features},
               {"informative", t.informative},
               {"num_classes", t.num_classes},
               {"separation", t.separation},
               {"noise", t.noise},
               {"dead_noise", t.dead_noise}};
  j["model"] = {{"arch", ArchName(cfg.model.arch)},
                {"hidden", cfg.model.hidden}};
  const RoundConfig& rc = cfg.round;
  j["round"] = {{"q", rc.q},
                {"eta", rc.eta},
                {"sigma", rc.sigma},
                {"R", rc.R},
                {"C", rc.C},
                {"slack", rc.slack},
                {"T", rc.T},
                {"client_clipping", rc.client_clipping},
                {"validation", rc.validation},
                {"ldp_post_clip", rc.ldp_post_clip}};
  const AttackSpec& a = cfg.attack;
  ordered_json attack;
  if (!cfg.attack_trigger_default) {
    attack["trigger_features"] = a.trigger.features;
  }
  attack["trigger_value"] = a.trigger.value;
  attack["target_label"] = a.target_label;
  attack["poison_fraction"] = a.poison_fraction;
  attack["local_iters"] = a.local_iters;
  attack["lr"] = a.lr;
  attack["single_shot"] = a.single_shot;
  attack["start_round"] = a.start_round;
  attack["respect_bound"] = a.respect_bound;
  attack["oversize_factor"] = a.oversize_factor;
  j["attack"] = attack;
  j["accountant"] = {{"delta", cfg.delta}};
  j["field"] = {{"modulus", cfg.modulus}, {"scale_bits", cfg.scale_bits}};
  j["seed"] = cfg.seed;
  j["runs"] = cfg.runs;
  j["eval_every"] = cfg.eval_every;
  j["threads"] = cfg.threads;
  j["write_transcripts"] = cfg.write_transcripts;
  j["record_wall_time"] = cfg.record_wall_time;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

void ValidateExperimentConfig(const ExperimentConfig& cfg) {
  const PopulationSpec& p = cfg.population;
  Require(p.n >= 1, "population.n", "need at least one client");
  Require(p.per_client >= 1, "population.per_client", "must be >= 1");
  Require(p.shards_per_client >= 1, "population.shards_per_client",
          "must be >= 1");
  Require(p.K < p.n - p.K, "population.K",
          "malicious clients must be fewer than benign clients");
  Require(p.p_i > 0.0 && p.p_i <= 1.0, "population.p_i", "must be in (0, 1]");
  Require(p.test_size >= 1, "population.test_size", "must be >= 1");

  const TaskSpec& t = cfg.task;
  Require(t.num_classes >= 2, "task.num_classes", "must be >= 2");
  if (p.dataset_path.empty()) {
    Require(t.num_features >= 1, "task.num_features", "must be >= 1");
    Require(t.informative >= 1 && t.informative <= t.num_features,
            "task.informative", "must be in [1, num_features]");
    Require(t.separation >= 0.0, "task.separation", "must be >= 0");
    Require(t.noise >= 0.0, "task.noise", "must be >= 0");
    Require(t.dead_noise >= 0.0, "task.dead_noise", "must be >= 0");
  }
  if (cfg.model.arch == Arch::kMlp1) {
    Require(cfg.model.hidden >= 1, "model.hidden", "must be >= 1");
  }

  const RoundConfig& rc = cfg.round;
  Require(rc.q > 0.0 && rc.q <= 1.0, "round.q", "must be in (0, 1]");
  Require(rc.eta > 0.0, "round.eta", "must be positive");
  Require(rc.sigma >= 0.0 && std::isfinite(rc.sigma), "round.sigma",
          "must be finite and >= 0");
  Require(rc.R > 0.0 && std::isfinite(rc.R), "round.R",
          "must be finite and positive");
  Require(rc.C > 0.0 && std::isfinite(rc.C), "round.C",
          "must be finite and positive");
  Require(rc.slack >= 0.0, "round.slack", "must be >= 0");
  Require(rc.T >= 0, "round.T", "must be >= 0");

  const AttackSpec& a = cfg.attack;
  Require(a.target_label >= 0 && a.target_label < t.num_classes,
          "attack.target_label", "must be a valid class");
  Require(a.poison_fraction >= 0.0 && a.poison_fraction <= 1.0,
          "attack.poison_fraction", "must be in [0, 1]");
  Require(a.local_iters >= 0, "attack.local_iters", "must be >= 0");
  Require(a.lr >= 0.0, "attack.lr", "must be >= 0");
  Require(a.start_round >= 0, "attack.start_round", "must be >= 0");
  Require(a.oversize_factor >= 0.0, "attack.oversize_factor", "must be >= 0");
  if (!cfg.attack_trigger_default) {
    Require(!a.trigger.features.empty(), "attack.trigger_features",
            "must not be empty");
    if (p.dataset_path.empty()) {
      for (size_t f : a.trigger.features) {
        Require(f < t.num_features, "attack.trigger_features",
                "feature index out of range");
      }
    }
  }

  Require(cfg.delta > 0.0 && cfg.delta < 1.0, "accountant.delta",
          "must be in (0, 1)");
  Require(cfg.scale_bits >= 0 && cfg.scale_bits <= 30, "field.scale_bits",
          "must be in [0, 30]");
  Require(cfg.modulus > 2 && cfg.modulus < (uint64_t{1} << 62) &&
              IsPrime(cfg.modulus),
          "field.modulus", "must be an odd prime below 2^62");
  // Every client coordinate is bounded by C, so the aggregate of n clients
  // must stay inside the signed half-range.
  const double headroom = static_cast<double>(p.n) * rc.C *
                          std::ldexp(1.0, cfg.scale_bits);
  Require(headroom < static_cast<double>(cfg.modulus) / 2.0, "round.C",
          "n * C * 2^scale_bits must stay below modulus / 2");

  Require(cfg.runs >= 1, "runs", "must be >= 1");
  Require(cfg.eval_every >= 1, "eval_every", "must be >= 1");
  Require(cfg.threads >= 1, "threads", "must be >= 1");
}

World BuildWorld(const ExperimentConfig& cfg, uint64_t seed) {
  const PopulationSpec& p = cfg.population;
  Rng data_rng = Rng::Derive(seed, Stream::kDataGeneration);
  World world;
  std::vector<Dataset> shards;
  size_t num_features = 0;
  if (p.dataset_path.empty()) {
    const SyntheticTask task(cfg.task, data_rng);
    shards = MakePopulation(task, p.n, p.per_client, p.shards_per_client,
                            data_rng);
    world.clean_test = task.Sample(p.test_size, data_rng);
    num_features = cfg.task.num_features;
  } else {
    Dataset pool;
    try {
      pool = LoadDatasetText(p.dataset_path, cfg.task.num_classes);
    } catch (const UsageError& e) {
      throw ConfigError("population.dataset_path", e.what());
    }
    if (pool.size() <= p.test_size) {
      throw ConfigError("population.test_size",
                        "dataset has too few records for the test split");
    }
    Shuffle(pool.records, data_rng);
    world.clean_test = Dataset{pool.num_features, pool.num_classes, {}};
    world.clean_test.records.assign(pool.records.begin(),
                                    pool.records.begin() + p.test_size);
    pool.records.erase(pool.records.begin(),
                       pool.records.begin() + p.test_size);
    num_features = pool.num_features;
    shards = ShardByLabel(std::move(pool), p.n, p.shards_per_client, data_rng);
  }

  world.trigger = cfg.attack.trigger;
  if (cfg.attack_trigger_default) {
    world.trigger.features.clear();
    const size_t first = p.dataset_path.empty()
                             ? cfg.task.informative
                             : num_features - std::max<size_t>(
                                                  1, num_features / 10);
    for (size_t f = first; f < num_features; ++f) {
      world.trigger.features.push_back(f);
    }
  }
  for (size_t f : world.trigger.features) {
    if (f >= num_features) {
      throw ConfigError("attack.trigger_features",
                        "feature index out of range for the dataset");
    }
  }

  const int target = cfg.attack.target_label;
  const ClientKind benign = cfg.variant == Variant::kPrecad
                                ? ClientKind::kBenign
                            : cfg.variant == Variant::kLdp
                                ? ClientKind::kLdpBenign
                                : ClientKind::kNonPrivateBenign;
  world.population.clients.resize(p.n);
  for (size_t i = 0; i < p.n; ++i) {
    Client& c = world.population.clients[i];
    c.id = static_cast<int64_t>(i);
    c.p_i = p.p_i;
    c.data = std::move(shards[i]);
    if (i < p.K) {
      c.kind = ClientKind::kMaliciousBackdoor;
      Rng poison = Rng::Derive(seed, Stream::kPoisoning, i);
      c.poisoned = PoisonBackdoor(c.data, world.trigger, target,
                                  cfg.attack.poison_fraction, poison);
    } else {
      c.kind = benign;
    }
  }
  world.triggered_test =
      MakeTriggeredSet(world.clean_test, world.trigger, target);
  if (world.triggered_test.empty()) {
    throw ConfigError("attack.target_label",
                      "test set has no records outside the target class");
  }

  if (cfg.model.arch == Arch::kLogistic) {
    world.initial = Model::Logistic(num_features, cfg.task.num_classes);
  } else {
    Rng init = Rng::Derive(seed, Stream::kModelInit);
    world.initial = Model::Mlp1(num_features, cfg.task.num_classes,
                                cfg.model.hidden, init);
  }
  return world;
}

TrainConfig MakeTrainConfig(const ExperimentConfig& cfg, const World& world,
                            uint64_t seed) {
  TrainConfig tc;
  tc.variant = cfg.variant;
  tc.round = cfg.round;
  tc.attack = cfg.attack;
  tc.attack.trigger = world.trigger;
  tc.delta = cfg.delta;
  tc.eval_every = cfg.eval_every;
  tc.seed = seed;
  tc.field = PrimeField(cfg.modulus);
  tc.scale_bits = cfg.scale_bits;
  tc.threads = cfg.threads;
  tc.record_wall_time = cfg.record_wall_time;
  return tc;
}

std::vector<MetricsRow> MeanHistory(
    const std::vector<std::vector<MetricsRow>>& histories) {
  if (histories.empty()) return {};
  const size_t rows = histories.front().size();
  for (const auto& h : histories) {
    if (h.size() != rows) throw UsageError("histories differ in length");
  }
  const double inv = 1.0 / static_cast<double>(histories.size());
  std::vector<MetricsRow> mean(rows);
  for (size_t r = 0; r < rows; ++r) {
    MetricsRow& m = mean[r];
    m.round = histories.front()[r].round;
    m.main_acc = m.backdoor_acc = m.eps_server = m.eps_client = 0.0;
    std::array<double, 3> bytes{};
    for (const auto& h : histories) {
      const MetricsRow& x = h[r];
      m.main_acc += x.main_acc * inv;
      m.backdoor_acc += x.backdoor_acc * inv;
      m.eps_server += x.eps_server * inv;
      m.eps_client += x.eps_client * inv;
      m.wall_ms += x.wall_ms * inv;
      m.max_t_i = std::max(m.max_t_i, x.max_t_i);
      for (int k = 0; k < 3; ++k) {
        bytes[k] += static_cast<double>(x.bytes_sent[k]) * inv;
      }
    }
    for (int k = 0; k < 3; ++k) {
      m.bytes_sent[k] = static_cast<uint64_t>(std::llround(bytes[k]));
    }
  }
  return mean;
}

std::string MetricsRowToJson(const MetricsRow& row, std::string_view variant,
                             std::optional<uint64_t> seed) {
  ordered_json j;
  j["round"] = row.round;
  j["variant"] = variant;
  if (seed) j["seed"] = *seed;
  j["main_acc"] = row.main_acc;
  j["backdoor_acc"] = row.backdoor_acc;
  j["eps_server"] = NumberOrNull(row.eps_server);
  j["eps_client"] = NumberOrNull(row.eps_client);
  j["max_t_i"] = row.max_t_i;
  j["bytes_clients"] = row.bytes_sent[0];
  j["bytes_server_a"] = row.bytes_sent[1];
  j["bytes_server_b"] = row.bytes_sent[2];
  j["wall_ms"] = row.wall_ms;
  return j.dump();
}

ExperimentResult RunExperiment(
    const ExperimentConfig& cfg,
    const std::optional<std::filesystem::path>& out) {
  ValidateExperimentConfig(cfg);
  const std::vector<uint64_t> seeds = cfg.Seeds();
  ExperimentResult result;
  result.runs.resize(seeds.size());

  // Seeds run side by side when there is more than one; otherwise the
  // threads go to the client updates inside each round.
  const bool across_seeds = seeds.size() > 1 && cfg.threads > 1;
  ParallelFor(seeds.size(), across_seeds ? cfg.threads : 1, [&](size_t k) {
    const World world = BuildWorld(cfg, seeds[k]);
    TrainConfig tc = MakeTrainConfig(cfg, world, seeds[k]);
    if (across_seeds) tc.threads = 1;
    result.runs[k].seed = seeds[k];
    result.runs[k].result = Train(tc, world.population, world.initial,
                                  world.clean_test, world.triggered_test);
  });

  std::vector<std::vector<MetricsRow>> histories;
  for (const RunOutput& run : result.runs) {
    histories.push_back(run.result.history);
  }
  result.mean = MeanHistory(histories);

  if (out) {
    std::filesystem::create_directories(*out);
    const std::string_view variant = VariantName(cfg.variant);
    for (const RunOutput& run : result.runs) {
      std::string text;
      for (const MetricsRow& row : run.result.history) {
        text += MetricsRowToJson(row, variant, run.seed) + "\n";
      }
      WriteFile(*out / ("run_seed_" + std::to_string(run.seed) + ".jsonl"),
                text);
      if (cfg.write_transcripts) {
        std::filesystem::create_directories(*out / "transcripts");
        WriteFile(*out / "transcripts" /
                      ("seed_" + std::to_string(run.seed) + ".jsonl"),
                  run.result.transcript.ToJsonLines());
      }
    }
    std::string text;
    for (const MetricsRow& row : result.mean) {
      text += MetricsRowToJson(row, variant, std::nullopt) + "\n";
    }
    WriteFile(*out / "mean.jsonl", text);
    WriteFile(*out / "config.json", ExperimentConfigToJson(cfg));
  }
  return result;
}

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kN:
      return "n";
    case SweepAxis::kK:
      return "K";
    case SweepAxis::kC:
      return "C";
    case SweepAxis::kSigma:
      return "sigma";
  }
  return "unknown";
}

SweepAxis ParseSweepAxis(std::string_view name) {
  if (name == "n") return SweepAxis::kN;
  if (name == "K") return SweepAxis::kK;
  if (name == "C") return SweepAxis::kC;
  if (name == "sigma") return SweepAxis::kSigma;
  throw ConfigError("sweep.axis", "unknown axis '" + std::string(name) +
                                      "' (expected n, K, C or sigma)");
}

void ApplySweepValue(ExperimentConfig& cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kN:
      cfg.population.n = ToCount(value, "sweep.n");
      break;
    case SweepAxis::kK:
      cfg.population.K = ToCount(value, "sweep.K");
      break;
    case SweepAxis::kC:
      cfg.round.C = value;
      break;
    case SweepAxis::kSigma:
      cfg.round.sigma = value;
      break;
  }
}

std::vector<SweepRow> Sweep(const ExperimentConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::optional<std::filesystem::path>& out) {
  if (values.empty()) throw ConfigError("sweep.values", "no values given");
  std::vector<ExperimentConfig> points;
  for (double v : values) {
    ExperimentConfig point = cfg;
    ApplySweepValue(point, axis, v);
    ValidateExperimentConfig(point);
    points.push_back(std::move(point));
  }
  std::vector<SweepRow> rows;
  for (size_t k = 0; k < points.size(); ++k) {
    std::optional<std::filesystem::path> dir;
    if (out) {
      dir = *out / (std::string(SweepAxisName(axis)) + "_" +
                    ShortValue(values[k]));
    }
    const ExperimentResult r = RunExperiment(points[k], dir);
    for (const MetricsRow& m : r.mean) rows.push_back({values[k], m});
  }
  if (out) {
    std::filesystem::create_directories(*out);
    std::string text = SweepCsvHeader();
    for (const SweepRow& row : rows) {
      text += SweepCsvRow(axis, cfg.variant, row);
    }
    WriteFile(*out / "sweep.csv", text);
  }
  return rows;
}

std::string SweepCsvHeader() {
  return "axis,value,variant,round,main_acc,backdoor_acc,eps_server,"
         "eps_client,max_t_i,bytes_clients,bytes_server_a,bytes_server_b,"
         "wall_ms\n";
}

std::string SweepCsvRow(SweepAxis axis, Variant variant, const SweepRow& row) {
  const MetricsRow& m = row.mean;
  std::string s;
  s += std::string(SweepAxisName(axis)) + ",";
  s += FormatValue(row.value) + ",";
  s += std::string(VariantName(variant)) + ",";
  s += std::to_string(m.round) + ",";
  s += FormatValue(m.main_acc) + ",";
  s += FormatValue(m.backdoor_acc) + ",";
  s += FormatValue(m.eps_server) + ",";
  s += FormatValue(m.eps_client) + ",";
  s += std::to_string(m.max_t_i) + ",";
  s += std::to_string(m.bytes_sent[0]) + ",";
  s += std::to_string(m.bytes_sent[1]) + ",";
  s += std::to_string(m.bytes_sent[2]) + ",";
  s += FormatValue(m.wall_ms) + "\n";
  return s;
}

std::vector<BenchRow> ValidateBench(const std::vector<size_t>& dims,
                                    size_t iters, double C, uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  if (iters == 0) throw ConfigError("iters", "must be >= 1");
  if (!(C > 0.0)) throw ConfigError("C", "must be positive");
  const PrimeField field;
  const FixedPointCodec codec(field, FixedPointCodec::kDefaultScaleBits);
  TrustedDealer dealer(field, seed);
  std::vector<BenchRow> rows;
  for (size_t d : dims) {
    if (d == 0) throw ConfigError("dims", "dimension must be >= 1");
    Rng rng = Rng::Derive(seed, Stream::kTest, d);
    BenchRow row;
    row.d = d;
    double total_ms = 0.0;
    for (size_t it = 0; it < iters; ++it) {
      std::vector<double> x(d);
      for (double& v : x) v = rng.Normal();
      const double target = C * (0.5 + rng.Uniform());
      Scale(target / L2Norm(x), x);
      const FieldVector enc = codec.EncodeVector(x);
      const std::vector<double> quantized = codec.DecodeVector(enc);
      const bool expected = L2Norm(quantized) <= C + kDefaultValidationSlack;
      auto [a, b] = Split(field, enc, rng);
      const auto start = Clock::now();
      const ValidationVerdict v = ValidateUpdate(
          codec, a, b, C, kDefaultValidationSlack, dealer,
          static_cast<int64_t>(it));
      total_ms += std::chrono::duration<double, std::milli>(Clock::now() -
                                                            start)
                      .count();
      if (v.valid != expected) ++row.verdict_error_count;
    }
    row.mean_ms = total_ms / static_cast<double>(iters);
    rows.push_back(row);
  }
  return rows;
}

AccountantAnswer RunAccountant(const AccountantQuery& query) {
  const PrivacyParams& p = query.params;
  p.Validate();
  AccountantAnswer a;
  const GdpMu server = MuRecordServerCorrupted(
      p.p_i, p.EffectiveParticipation(), p.sigma);
  const GdpMu client =
      MuRecordClientsOnly(p.q, p.p_i, static_cast<double>(p.T), p.sigma);
  a.mu_server = server.mu;
  a.mu_client = client.mu;
  a.eps_server = EpsAtDelta(server, query.delta);
  a.eps_client = EpsAtDelta(client, query.delta);
  const GdpMu level =
      MuClientLevel(p.q, static_cast<double>(p.T), p.sigma, p.R, p.C);
  const RobustnessBounds b =
      ComputeRobustnessBounds({query.L, query.B, query.K, level});
  a.robust_lower = b.lower;
  a.robust_upper = b.upper;
  return a;
}

std::string AccountantAnswerToJson(const AccountantAnswer& a) {
  ordered_json j;
  j["mu_server"] = NumberOrNull(a.mu_server);
  j["mu_client"] = NumberOrNull(a.mu_client);
  j["eps_server"] = NumberOrNull(a.eps_server);
  j["eps_client"] = NumberOrNull(a.eps_client);
  j["robust_lower"] = NumberOrNull(a.robust_lower);
  j["robust_upper"] = NumberOrNull(a.robust_upper);
  return j.dump();
}

}  // namespace secfl
