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

#include "secfl/learn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "secfl/errors.h"
#include "secfl/rng.h"
#include "secfl/vecmath.h"

namespace secfl {
namespace {

void Softmax(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
}

double LogSumExp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

void CheckRecord(const Model& model, const Record& z) {
  if (z.features.size() != model.num_features) {
    throw UsageError("record has " + std::to_string(z.features.size()) +
                     " features, model expects " +
                     std::to_string(model.num_features));
  }
  if (z.label < 0 || z.label >= model.num_classes) {
    throw UsageError("record label out of range");
  }
}

// Hidden activations of the mlp1 architecture.
std::vector<double> Hidden(const Model& m, std::span<const double> x) {
  const size_t nf = m.num_features;
  std::vector<double> h(m.hidden);
  const double* w1 = m.theta.data();
  const double* b1 = w1 + m.hidden * nf;
  for (size_t j = 0; j < m.hidden; ++j) {
    double a = b1[j];
    for (size_t f = 0; f < nf; ++f) a += w1[j * nf + f] * x[f];
    h[j] = std::tanh(a);
  }
  return h;
}

}  // namespace

std::string_view ArchName(Arch arch) {
  return arch == Arch::kLogistic ? "logistic" : "mlp1";
}

Arch ParseArch(std::string_view name) {
  if (name == "logistic") return Arch::kLogistic;
  if (name == "mlp1") return Arch::kMlp1;
  throw UsageError("unknown architecture '" + std::string(name) + "'");
}

size_t ParameterCount(Arch arch, size_t num_features, int num_classes,
                      size_t hidden) {
  const size_t k = static_cast<size_t>(num_classes);
  if (arch == Arch::kLogistic) return k * (num_features + 1);
  return hidden * (num_features + 1) + k * (hidden + 1);
}

Model Model::Logistic(size_t num_features, int num_classes) {
  if (num_classes < 2) throw UsageError("need at least two classes");
  Model m;
  m.arch = Arch::kLogistic;
  m.num_features = num_features;
  m.num_classes = num_classes;
  m.theta.assign(ParameterCount(m.arch, num_features, num_classes, 0), 0.0);
  return m;
}

Model Model::Mlp1(size_t num_features, int num_classes, size_t hidden,
                  Rng& rng) {
  if (num_classes < 2) throw UsageError("need at least two classes");
  if (hidden == 0) throw UsageError("mlp1 needs a positive hidden width");
  Model m;
  m.arch = Arch::kMlp1;
  m.num_features = num_features;
  m.num_classes = num_classes;
  m.hidden = hidden;
  m.theta.assign(ParameterCount(m.arch, num_features, num_classes, hidden),
                 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_features));
  for (size_t i = 0; i < hidden * num_features; ++i) {
    m.theta[i] = rng.Normal(0.0, scale);
  }
  return m;
}

std::vector<double> Model::Logits(std::span<const double> x) const {
  const size_t k = static_cast<size_t>(num_classes);
  std::vector<double> z(k);
  if (arch == Arch::kLogistic) {
    const double* w = theta.data();
    const double* b = w + k * num_features;
    for (size_t c = 0; c < k; ++c) {
      double a = b[c];
      for (size_t f = 0; f < num_features; ++f) {
        a += w[c * num_features + f] * x[f];
      }
      z[c] = a;
    }
    return z;
  }
  const std::vector<double> h = Hidden(*this, x);
  const double* w2 = theta.data() + hidden * (num_features + 1);
  const double* b2 = w2 + k * hidden;
  for (size_t c = 0; c < k; ++c) {
    double a = b2[c];
    for (size_t j = 0; j < hidden; ++j) a += w2[c * hidden + j] * h[j];
    z[c] = a;
  }
  return z;
}

int Model::Predict(std::span<const double> x) const {
  const std::vector<double> z = Logits(x);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double CrossEntropy(const Model& model, const Record& z) {
  CheckRecord(model, z);
  const std::vector<double> logits = model.Logits(z.features);
  return LogSumExp(logits) - logits[z.label];
}

double BoundedLoss(const Model& model, const Record& z, double B) {
  return std::clamp(CrossEntropy(model, z), 0.0, B);
}

std::vector<double> PerRecordGradient(const Model& model, const Record& z) {
  CheckRecord(model, z);
  const size_t k = static_cast<size_t>(model.num_classes);
  const size_t nf = model.num_features;
  std::vector<double> grad(model.dimension(), 0.0);

  if (model.arch == Arch::kLogistic) {
    std::vector<double> p = model.Logits(z.features);
    Softmax(p);
    p[z.label] -= 1.0;
    for (size_t c = 0; c < k; ++c) {
      for (size_t f = 0; f < nf; ++f) grad[c * nf + f] = p[c] * z.features[f];
      grad[k * nf + c] = p[c];
    }
    return grad;
  }

  const size_t hw = model.hidden;
  const std::vector<double> h = Hidden(model, z.features);
  std::vector<double> p = model.Logits(z.features);
  Softmax(p);
  p[z.label] -= 1.0;

  const size_t w2_off = hw * (nf + 1);
  const size_t b2_off = w2_off + k * hw;
  const double* w2 = model.theta.data() + w2_off;
  std::vector<double> dh(hw, 0.0);
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < hw; ++j) {
      grad[w2_off + c * hw + j] = p[c] * h[j];
      dh[j] += w2[c * hw + j] * p[c];
    }
    grad[b2_off + c] = p[c];
  }
  for (size_t j = 0; j < hw; ++j) {
    const double da = dh[j] * (1.0 - h[j] * h[j]);
    for (size_t f = 0; f < nf; ++f) grad[j * nf + f] = da * z.features[f];
    grad[hw * nf + j] = da;
  }
  return grad;
}

std::vector<double> ClipToNorm(std::span<const double> g, double bound) {
  if (!(bound > 0.0)) throw DomainError("clip bound must be positive");
  std::vector<double> out(g.begin(), g.end());
  const double norm = L2Norm(out);
  if (norm > bound) Scale(bound / norm, out);
  return out;
}

std::vector<size_t> SampleRecords(size_t n, double p, Rng& rng) {
  std::vector<size_t> out;
  for (size_t i = 0; i < n; ++i) {
    if (rng.Bernoulli(p)) out.push_back(i);
  }
  return out;
}

std::vector<double> ClippedUpdate(const Model& model, const Dataset& data,
                                  std::span<const size_t> indices,
                                  const ClientConfig& cfg) {
  std::vector<double> delta(model.dimension(), 0.0);
  for (size_t idx : indices) {
    std::vector<double> g = PerRecordGradient(model, data.records.at(idx));
    if (cfg.record_clipping) g = ClipToNorm(g, cfg.R);
    Axpy(-1.0, g, delta);
  }
  if (cfg.client_clipping) delta = ClipToNorm(delta, cfg.C);
  return delta;
}

std::vector<double> LocalUpdate(const Model& model, const Dataset& data,
                                const ClientConfig& cfg, Rng& rng) {
  const std::vector<size_t> indices = SampleRecords(data.size(), cfg.p_i, rng);
  return ClippedUpdate(model, data, indices, cfg);
}

std::pair<ShareVector, ShareVector> EncodeAndSplit(
    std::span<const double> delta, const FixedPointCodec& codec, Rng& rng) {
  const FieldVector encoded = codec.EncodeVector(delta);
  return Split(codec.field(), encoded, rng);
}

SyntheticTask::SyntheticTask(const TaskSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.num_classes < 2) throw UsageError("need at least two classes");
  if (spec.informative == 0 || spec.informative > spec.num_features) {
    throw UsageError("informative feature count must lie in [1, features]");
  }
  means_.resize(spec.num_classes);
  for (auto& mean : means_) {
    mean.assign(spec.num_features, 0.0);
    for (size_t f = 0; f < spec.informative; ++f) mean[f] = rng.Normal();
    const double norm = L2Norm(mean);
    Scale(spec.separation / norm, mean);
  }
}

Record SyntheticTask::SampleRecord(int label, Rng& rng) const {
  Record r;
  r.label = label;
  r.features.resize(spec_.num_features);
  for (size_t f = 0; f < spec_.num_features; ++f) {
    const double sd = f < spec_.informative ? spec_.noise : spec_.dead_noise;
    r.features[f] = means_[label][f] + rng.Normal(0.0, sd);
  }
  return r;
}

Dataset SyntheticTask::Sample(size_t count, Rng& rng) const {
  Dataset d{spec_.num_features, spec_.num_classes, {}};
  d.records.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    d.records.push_back(
        SampleRecord(static_cast<int>(i % spec_.num_classes), rng));
  }
  std::shuffle(d.records.begin(), d.records.end(), rng.engine());
  return d;
}

std::vector<Dataset> ShardByLabel(Dataset pool, size_t n,
                                  size_t shards_per_client, Rng& rng) {
  if (n == 0 || shards_per_client == 0) {
    throw UsageError("need at least one client and one shard per client");
  }
  std::stable_sort(pool.records.begin(), pool.records.end(),
                   [](const Record& a, const Record& b) {
                     return a.label < b.label;
                   });
  const size_t num_shards = n * shards_per_client;
  const size_t total = pool.records.size();
  std::vector<size_t> order(num_shards);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<Dataset> clients(
      n, Dataset{pool.num_features, pool.num_classes, {}});
  for (size_t s = 0; s < num_shards; ++s) {
    const size_t shard = order[s];
    const size_t begin = shard * total / num_shards;
    const size_t end = (shard + 1) * total / num_shards;
    Dataset& dst = clients[s / shards_per_client];
    for (size_t i = begin; i < end; ++i) dst.records.push_back(pool.records[i]);
  }
  return clients;
}

std::vector<Dataset> MakePopulation(const SyntheticTask& task, size_t n,
                                    size_t per_client,
                                    size_t shards_per_client, Rng& rng) {
  return ShardByLabel(task.Sample(n * per_client, rng), n, shards_per_client,
                      rng);
}

void ApplyTrigger(const Trigger& trigger, Record& r) {
  for (size_t f : trigger.features) {
    if (f >= r.features.size()) {
      throw UsageError("trigger feature index " + std::to_string(f) +
                       " out of range");
    }
    r.features[f] = trigger.value;
  }
}

Dataset PoisonBackdoor(const Dataset& data, const Trigger& trigger,
                       int target_label, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DomainError("poison fraction must lie in [0, 1]");
  }
  if (target_label < 0 || target_label >= data.num_classes) {
    throw UsageError("target label out of range");
  }
  for (size_t f : trigger.features) {
    if (f >= data.num_features) throw UsageError("trigger index out of range");
  }
  Dataset out = data;
  std::vector<size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  const size_t count = static_cast<size_t>(
      std::llround(fraction * static_cast<double>(out.size())));
  for (size_t i = 0; i < count; ++i) {
    Record& r = out.records[order[i]];
    ApplyTrigger(trigger, r);
    r.label = target_label;
  }
  return out;
}

Dataset MakeTriggeredSet(const Dataset& clean, const Trigger& trigger,
                         int target_label) {
  Dataset out{clean.num_features, clean.num_classes, {}};
  for (const Record& r : clean.records) {
    if (r.label == target_label) continue;
    Record t = r;
    ApplyTrigger(trigger, t);
    t.label = target_label;
    out.records.push_back(std::move(t));
  }
  return out;
}

double Accuracy(const Model& model, const Dataset& data) {
  if (data.empty()) throw UsageError("accuracy of an empty dataset");
  size_t correct = 0;
  for (const Record& r : data.records) {
    if (model.Predict(r.features) == r.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

EvalMetrics EvaluateModel(const Model& model, const Dataset& clean_test,
                          const Dataset& triggered_test, int target_label) {
  if (clean_test.empty() || triggered_test.empty()) {
    throw UsageError("evaluation needs non-empty test sets");
  }
  EvalMetrics m;
  m.main_acc = Accuracy(model, clean_test);
  size_t hits = 0;
  for (const Record& r : triggered_test.records) {
    if (model.Predict(r.features) == target_label) ++hits;
  }
  m.backdoor_acc =
      static_cast<double>(hits) / static_cast<double>(triggered_test.size());
  return m;
}

Dataset LoadDatasetText(const std::string& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset file '" + path + "'");
  Dataset d;
  d.num_classes = num_classes;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (values.empty()) continue;
    if (values.size() < 2) {
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": need at least one feature and a label");
    }
    Record r;
    r.label = static_cast<int>(values.back());
    values.pop_back();
    r.features = std::move(values);
    if (d.num_features == 0) d.num_features = r.features.size();
    if (r.features.size() != d.num_features || r.label < 0 ||
        r.label >= num_classes) {
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": inconsistent width or label out of range");
    }
    d.records.push_back(std::move(r));
  }
  return d;
}

}  // namespace secfl
