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

// Models, per-record gradients, the two-level clipped local update, synthetic
// non-IID client data and backdoor poisoning.

#ifndef SECFL_LEARN_H_
#define SECFL_LEARN_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secfl/ffield.h"
#include "secfl/sharing.h"

namespace secfl {

class Rng;

struct Record {
  std::vector<double> features;
  int label = 0;
};

struct Dataset {
  size_t num_features = 0;
  int num_classes = 0;
  std::vector<Record> records;

  size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

enum class Arch { kLogistic, kMlp1 };

std::string_view ArchName(Arch arch);
Arch ParseArch(std::string_view name);

// Parameter layout:
//   logistic: W (classes x features, row-major), then b (classes).
//   mlp1:     W1 (hidden x features), b1 (hidden), W2 (classes x hidden),
//             b2 (classes); tanh hidden activation.
struct Model {
  Arch arch = Arch::kLogistic;
  size_t num_features = 0;
  int num_classes = 0;
  size_t hidden = 0;
  std::vector<double> theta;

  static Model Logistic(size_t num_features, int num_classes);
  // Small random first-layer weights; the output layer starts at zero.
  static Model Mlp1(size_t num_features, int num_classes, size_t hidden,
                    Rng& rng);

  size_t dimension() const { return theta.size(); }

  std::vector<double> Logits(std::span<const double> x) const;
  int Predict(std::span<const double> x) const;
};

size_t ParameterCount(Arch arch, size_t num_features, int num_classes,
                      size_t hidden);

// Unclamped cross-entropy.
double CrossEntropy(const Model& model, const Record& z);

// Cross-entropy clamped to [0, B].
double BoundedLoss(const Model& model, const Record& z, double B);

// Gradient of the unclamped cross-entropy with respect to theta.
std::vector<double> PerRecordGradient(const Model& model, const Record& z);

// g * min(1, bound / ||g||_2); zero stays zero.
std::vector<double> ClipToNorm(std::span<const double> g, double bound);

struct ClientConfig {
  double p_i = 0.05;   // record sampling probability
  double R = 2.0;      // record clip norm
  double C = 30.0;     // client clip norm
  bool record_clipping = true;
  bool client_clipping = true;
};

// Poisson sampling: each index in [0, n) kept independently with
// probability p.
std::vector<size_t> SampleRecords(size_t n, double p, Rng& rng);

// -sum of (optionally R-clipped) gradients over `indices`, then optionally
// clipped to C. No learning rate is applied locally.
std::vector<double> ClippedUpdate(const Model& model, const Dataset& data,
                                  std::span<const size_t> indices,
                                  const ClientConfig& cfg);

// SampleRecords followed by ClippedUpdate.
std::vector<double> LocalUpdate(const Model& model, const Dataset& data,
                                const ClientConfig& cfg, Rng& rng);

// Fixed-point encodes delta at scale f and splits it for the two servers.
std::pair<ShareVector, ShareVector> EncodeAndSplit(
    std::span<const double> delta, const FixedPointCodec& codec, Rng& rng);

struct TaskSpec {
  size_t num_features = 20;
  // Features [0, informative) carry the class signal; the rest are
  // near-constant "dead" features, the analogue of always-black corner pixels.
  size_t informative = 16;
  int num_classes = 5;
  double separation = 3.0;   // norm of each class mean
  double noise = 1.0;        // per-feature noise on informative features
  double dead_noise = 0.05;  // per-feature noise on dead features
};

// Gaussian-mixture classification task with fixed class means.
class SyntheticTask {
 public:
  SyntheticTask(const TaskSpec& spec, Rng& rng);

  const TaskSpec& spec() const { return spec_; }
  const std::vector<std::vector<double>>& means() const { return means_; }

  Record SampleRecord(int label, Rng& rng) const;
  // Balanced labels (round robin), shuffled.
  Dataset Sample(size_t count, Rng& rng) const;

 private:
  TaskSpec spec_;
  std::vector<std::vector<double>> means_;
};

// Label-sorted sharding: n * per_client balanced records are sorted by label,
// cut into n * shards_per_client contiguous shards, and each client receives
// shards_per_client shards at random.
std::vector<Dataset> MakePopulation(const SyntheticTask& task, size_t n,
                                    size_t per_client,
                                    size_t shards_per_client, Rng& rng);

// Same sharding over an existing pool (e.g. an imported dataset).
std::vector<Dataset> ShardByLabel(Dataset pool, size_t n,
                                  size_t shards_per_client, Rng& rng);

struct Trigger {
  std::vector<size_t> features;
  double value = 1.0;
};

void ApplyTrigger(const Trigger& trigger, Record& r);

// Overwrites the trigger features and relabels a random `fraction` of the
// records; the rest stay benign.
Dataset PoisonBackdoor(const Dataset& data, const Trigger& trigger,
                       int target_label, double fraction, Rng& rng);

// Every non-target record of `clean` with the trigger applied and the target
// label.
Dataset MakeTriggeredSet(const Dataset& clean, const Trigger& trigger,
                         int target_label);

double Accuracy(const Model& model, const Dataset& data);

struct EvalMetrics {
  double main_acc = 0.0;
  double backdoor_acc = 0.0;
};

// main_acc on the clean set; backdoor_acc is the fraction of triggered inputs
// classified as target_label. Throws UsageError when either set is empty.
EvalMetrics EvaluateModel(const Model& model, const Dataset& clean_test,
                          const Dataset& triggered_test, int target_label);

// Reads one record per line, comma or whitespace separated, label in the last
// column.
Dataset LoadDatasetText(const std::string& path, int num_classes);

}  // namespace secfl

#endif  // SECFL_LEARN_H_
