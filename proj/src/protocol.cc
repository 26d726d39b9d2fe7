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

#include "secfl/protocol.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "secfl/accountant.h"
#include "secfl/errors.h"
#include "secfl/parallel.h"
#include "secfl/rng.h"
#include "secfl/sharing.h"
#include "secfl/vecmath.h"

namespace secfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Submission {
  int64_t client = 0;
  std::vector<double> delta;
  // Plaintext update before any client-side noise; equals delta otherwise.
  std::vector<double> clean;
  std::vector<double> noise;
  bool malicious = false;
};

bool AttackActive(const RoundContext& ctx, long t) {
  if (ctx.attack == nullptr || t < ctx.attack->start_round) return false;
  return !(ctx.attack->single_shot && ctx.attack_spent && *ctx.attack_spent);
}

// Whether the server side of `variant` enforces the client-level bound.
bool ServerChecksBound(Variant variant, const RoundConfig& cfg) {
  if (variant == Variant::kPrecad) return cfg.validation;
  if (variant == Variant::kLdp) return cfg.ldp_post_clip;
  return false;
}

std::vector<Submission> ComputeSubmissions(Variant variant,
                                           const ServerState& state,
                                           const Population& pop,
                                           std::span<const int64_t> selected,
                                           const RoundConfig& cfg,
                                           RoundContext& ctx) {
  const Model& model = state.model;
  const long t = state.t;
  const bool attack = AttackActive(ctx, t);

  std::vector<int64_t> attackers;
  if (attack) {
    for (int64_t i : selected) {
      if (IsMalicious(pop.clients[i].kind)) attackers.push_back(i);
    }
  }

  std::vector<double> replacement;
  if (!attackers.empty()) {
    Dataset mix{model.num_features, model.num_classes, {}};
    for (int64_t i : attackers) {
      const Dataset& p = pop.clients[i].poisoned;
      mix.records.insert(mix.records.end(), p.records.begin(),
                         p.records.end());
    }
    const Model target = TrainBackdoorModel(model, mix, ctx.attack->local_iters,
                                            ctx.attack->lr);
    double weight_sum = 0.0;
    for (int64_t i : selected) weight_sum += pop.clients[i].Weight();
    const double bound = ServerChecksBound(variant, cfg) &&
                                 ctx.attack->respect_bound
                             ? cfg.C
                             : kInf;
    replacement = MaliciousUpdate(model.theta, target.theta, cfg.eta,
                                  1.0 / weight_sum,
                                  static_cast<int>(attackers.size()), bound);
    if (ctx.attack->oversize_factor > 0.0) {
      const double norm = L2Norm(replacement);
      const double want = ctx.attack->oversize_factor * cfg.C;
      if (norm > 0.0) {
        Scale(want / norm, replacement);
      } else if (!replacement.empty()) {
        replacement[0] = want;
      }
    }
    if (ctx.attack->single_shot && ctx.attack_spent) *ctx.attack_spent = true;
  }

  std::vector<Submission> subs(selected.size());
  ParallelFor(selected.size(), ctx.threads, [&](size_t k) {
    const int64_t i = selected[k];
    const Client& client = pop.clients[i];
    Submission& s = subs[k];
    s.client = i;
    if (!replacement.empty() && IsMalicious(client.kind)) {
      s.malicious = true;
      s.delta = replacement;
      s.clean = replacement;
      return;
    }
    ClientConfig cc;
    cc.p_i = client.p_i;
    cc.R = cfg.R;
    cc.C = cfg.C;
    cc.record_clipping = variant != Variant::kNonPrivate;
    cc.client_clipping = variant == Variant::kPrecad && cfg.client_clipping;
    Rng sampling = Rng::Derive(ctx.seed, Stream::kRecordSampling, i, t);
    s.delta = LocalUpdate(model, client.data, cc, sampling);
    s.clean = s.delta;
    if (variant == Variant::kLdp && !IsMalicious(client.kind)) {
      Rng noise = Rng::Derive(ctx.seed, Stream::kClientNoise, i, t);
      s.noise.resize(s.delta.size());
      for (size_t j = 0; j < s.delta.size(); ++j) {
        s.noise[j] = noise.Normal(0.0, cfg.sigma * cfg.R);
        s.delta[j] += s.noise[j];
      }
      if (cfg.ldp_post_clip) s.delta = ClipToNorm(s.delta, cfg.C);
    }
  });
  return subs;
}

void Send(RoundContext& ctx, RoundRecord& rec, long t, int64_t sender,
          int64_t receiver, MessageKind kind, int64_t client, uint64_t bytes,
          uint64_t digest) {
  const size_t slot = sender >= 0 ? 0 : (sender == kServerAEndpoint ? 1 : 2);
  rec.bytes_sent[slot] += bytes;
  if (ctx.transcript) {
    ctx.transcript->Record(
        Message{t, sender, receiver, kind, client, bytes, digest});
  }
}

ServerState ApplyUpdate(const ServerState& state, const RoundConfig& cfg,
                        double weight_sum, std::span<const double> aggregate) {
  ServerState next = state;
  next.t = state.t + 1;
  Axpy(cfg.eta / weight_sum, aggregate, next.model.theta);
  return next;
}

ServerState Finish(const ServerState& state, RoundContext& ctx,
                   RoundRecord rec) {
  if (ctx.transcript) ctx.transcript->AddRound(std::move(rec));
  ServerState next = state;
  next.t = state.t + 1;
  return next;
}

// A sealed per-round noise seed for one server.
uint64_t NoiseSeed(uint64_t root, Stream stream, long t) {
  return Rng::Derive(root, stream, static_cast<uint64_t>(t)).NextU64();
}

std::vector<double> DrawNoise(uint64_t noise_seed, size_t d, double stddev) {
  Rng rng(noise_seed);
  std::vector<double> xi(d);
  for (double& v : xi) v = rng.Normal(0.0, stddev);
  return xi;
}

// Plaintext aggregation shared by the two baselines.
ServerState PlaintextRound(Variant variant, const ServerState& state,
                           const Population& pop, const RoundConfig& cfg,
                           RoundContext& ctx) {
  const long t = state.t;
  const size_t d = state.model.dimension();
  Rng select_rng = Rng::Derive(ctx.seed, Stream::kClientSelection, t);
  RoundRecord rec;
  rec.round = t;
  rec.selected = SelectClients(pop.size(), cfg.q, select_rng);

  const std::vector<Submission> subs =
      ComputeSubmissions(variant, state, pop, rec.selected, cfg, ctx);

  std::vector<double> aggregate(d, 0.0), clean(d, 0.0), noise(d, 0.0);
  const bool check = ServerChecksBound(variant, cfg);
  for (const Submission& s : subs) {
    Send(ctx, rec, t, s.client, kServerAEndpoint,
         MessageKind::kPlaintextUpdate, s.client, 8 * d, Fnv1a(s.delta));
    const bool ok = !check || L2Norm(s.delta) <= cfg.C + cfg.slack;
    rec.verdicts.emplace_back(s.client, ok);
    if (!ok) continue;
    rec.accepted.push_back(s.client);
    rec.weight_sum += pop.clients[s.client].Weight();
    Axpy(1.0, s.delta, aggregate);
    Axpy(1.0, s.clean, clean);
    if (!s.noise.empty()) Axpy(1.0, s.noise, noise);
  }
  if (ctx.audit) {
    RoundAudit audit;
    audit.plaintext_sum = clean;
    audit.noise_a = noise;
    audit.aggregate = aggregate;
    audit.num_accepted = rec.accepted.size();
    rec.audit = std::move(audit);
  }
  if (rec.accepted.empty() || rec.weight_sum <= 0.0) {
    rec.skipped = true;
    return Finish(state, ctx, std::move(rec));
  }
  const double weight_sum = rec.weight_sum;
  ServerState next = ApplyUpdate(state, cfg, weight_sum, aggregate);
  if (ctx.transcript) ctx.transcript->AddRound(std::move(rec));
  return next;
}

}  // namespace

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kPrecad:
      return "precad";
    case Variant::kLdp:
      return "ldp";
    case Variant::kNonPrivate:
      return "nonprivate";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  if (name == "precad") return Variant::kPrecad;
  if (name == "ldp") return Variant::kLdp;
  if (name == "nonprivate") return Variant::kNonPrivate;
  throw UsageError("unknown protocol variant '" + std::string(name) +
                   "' (expected precad, ldp or nonprivate)");
}

std::string_view ClientKindName(ClientKind kind) {
  switch (kind) {
    case ClientKind::kBenign:
      return "benign";
    case ClientKind::kMaliciousBackdoor:
      return "malicious_backdoor";
    case ClientKind::kLdpBenign:
      return "ldp_benign";
    case ClientKind::kNonPrivateBenign:
      return "nonprivate_benign";
  }
  return "unknown";
}

size_t Population::NumMalicious() const {
  return static_cast<size_t>(
      std::count_if(clients.begin(), clients.end(),
                    [](const Client& c) { return IsMalicious(c.kind); }));
}

std::vector<int64_t> SelectClients(size_t n, double q, Rng& rng) {
  std::vector<int64_t> out;
  for (size_t i = 0; i < n; ++i) {
    if (rng.Bernoulli(q)) out.push_back(static_cast<int64_t>(i));
  }
  return out;
}

std::vector<double> MaliciousUpdate(std::span<const double> theta_t,
                                    std::span<const double> theta_star,
                                    double eta, double weight, int K_active,
                                    double C) {
  if (K_active < 1) throw UsageError("need at least one active attacker");
  if (!(eta > 0.0) || !(weight > 0.0)) {
    throw DomainError("eta and weight must be positive");
  }
  std::vector<double> delta = Subtract(theta_star, theta_t);
  Scale(1.0 / (eta * weight * K_active), delta);
  if (std::isfinite(C)) delta = ClipToNorm(delta, C);
  return delta;
}

Model TrainBackdoorModel(const Model& theta_t, const Dataset& poisoned,
                         int local_iters, double lr) {
  Model m = theta_t;
  if (poisoned.empty()) return m;
  const double inv_n = 1.0 / static_cast<double>(poisoned.size());
  for (int it = 0; it < local_iters; ++it) {
    std::vector<double> grad(m.dimension(), 0.0);
    for (const Record& r : poisoned.records) {
      Axpy(inv_n, PerRecordGradient(m, r), grad);
    }
    Axpy(-lr, grad, m.theta);
  }
  return m;
}

ServerState RoundPrecad(const ServerState& state, const Population& pop,
                        const RoundConfig& cfg, RoundContext& ctx) {
  if (ctx.dealer == nullptr) throw UsageError("secure round needs a dealer");
  const long t = state.t;
  const size_t d = state.model.dimension();
  const FixedPointCodec& codec = ctx.codec;
  const PrimeField& field = codec.field();

  Rng select_rng = Rng::Derive(ctx.seed, Stream::kClientSelection, t);
  RoundRecord rec;
  rec.round = t;
  rec.selected = SelectClients(pop.size(), cfg.q, select_rng);

  const std::vector<Submission> subs =
      ComputeSubmissions(Variant::kPrecad, state, pop, rec.selected, cfg, ctx);

  // Clients encode and split; each server receives one share.
  std::vector<std::pair<ShareVector, ShareVector>> shares(subs.size());
  ParallelFor(subs.size(), ctx.threads, [&](size_t k) {
    const Submission& s = subs[k];
    Rng split = Rng::Derive(ctx.seed, Stream::kShareSplit, s.client, t);
    if (s.malicious) {
      // An attacker may send anything; saturate out-of-range coordinates.
      std::vector<double> v = s.delta;
      const double cap = 0.5 * codec.MaxMagnitude();
      for (double& x : v) x = std::clamp(x, -cap, cap);
      shares[k] = EncodeAndSplit(v, codec, split);
    } else {
      shares[k] = EncodeAndSplit(s.delta, codec, split);
    }
  });
  for (size_t k = 0; k < subs.size(); ++k) {
    const int64_t i = subs[k].client;
    Send(ctx, rec, t, i, kServerAEndpoint, MessageKind::kShareReceived, i,
         8 * d, Fnv1a(shares[k].first.values));
    Send(ctx, rec, t, i, kServerBEndpoint, MessageKind::kShareReceived, i,
         8 * d, Fnv1a(shares[k].second.values));
  }

  // Secure validation, in client index order so dealer output is fixed.
  std::vector<bool> accepted(subs.size(), true);
  if (cfg.validation) {
    for (size_t k = 0; k < subs.size(); ++k) {
      const int64_t i = subs[k].client;
      const ValidationVerdict v =
          ValidateUpdate(codec, shares[k].first, shares[k].second, cfg.C,
                         cfg.slack, *ctx.dealer, i);
      const uint64_t b_digest = Fnv1a(v.revealed_b);
      Send(ctx, rec, t, kServerAEndpoint, kServerBEndpoint,
           MessageKind::kMaskedVector, i, 8 * d, b_digest);
      Send(ctx, rec, t, kServerBEndpoint, kServerAEndpoint,
           MessageKind::kMaskedVector, i, 8 * d, b_digest);
      if (ctx.transcript) {
        ctx.transcript->RecordIdeal(IdealCall{t, i, "comparison_gate"});
      }
      Send(ctx, rec, t, kServerAEndpoint, kServerBEndpoint,
           MessageKind::kVerdictBit, i, 8, v.valid ? 1 : 0);
      Send(ctx, rec, t, kServerBEndpoint, kServerAEndpoint,
           MessageKind::kVerdictBit, i, 8, v.valid ? 1 : 0);
      accepted[k] = v.valid;
    }
  }

  ShareVector acc_a = ShareVector::Zero(PartyId::kServerA, d);
  ShareVector acc_b = ShareVector::Zero(PartyId::kServerB, d);
  std::vector<double> plaintext(d, 0.0);
  for (size_t k = 0; k < subs.size(); ++k) {
    rec.verdicts.emplace_back(subs[k].client, accepted[k]);
    if (!accepted[k]) continue;
    rec.accepted.push_back(subs[k].client);
    rec.weight_sum += pop.clients[subs[k].client].Weight();
    AccumulateInto(field, acc_a, shares[k].first);
    AccumulateInto(field, acc_b, shares[k].second);
    Axpy(1.0, subs[k].delta, plaintext);
  }

  if (rec.accepted.empty() || rec.weight_sum <= 0.0) {
    rec.skipped = true;
    return Finish(state, ctx, std::move(rec));
  }

  // Each server adds its own encoded Gaussian noise, then they exchange.
  const double stddev = cfg.R * cfg.sigma;
  const uint64_t seed_a = NoiseSeed(ctx.seed, Stream::kServerNoiseA, t);
  const uint64_t seed_b = NoiseSeed(ctx.seed, Stream::kServerNoiseB, t);
  rec.noise_seed_digest_a = SplitMix64(seed_a);
  rec.noise_seed_digest_b = SplitMix64(seed_b);
  const std::vector<double> xi_a = DrawNoise(seed_a, d, stddev);
  const std::vector<double> xi_b = DrawNoise(seed_b, d, stddev);
  const FieldVector enc_a = codec.EncodeVector(xi_a);
  const FieldVector enc_b = codec.EncodeVector(xi_b);
  for (size_t j = 0; j < d; ++j) {
    acc_a.values[j] = field.Add(acc_a.values[j], enc_a[j]);
    acc_b.values[j] = field.Add(acc_b.values[j], enc_b[j]);
  }
  Send(ctx, rec, t, kServerAEndpoint, kServerBEndpoint,
       MessageKind::kNoisyAccumulator, -1, 8 * d, Fnv1a(acc_a.values));
  Send(ctx, rec, t, kServerBEndpoint, kServerAEndpoint,
       MessageKind::kNoisyAccumulator, -1, 8 * d, Fnv1a(acc_b.values));

  const std::vector<double> aggregate =
      codec.DecodeVector(Reconstruct(field, acc_a, acc_b));

  if (ctx.audit) {
    RoundAudit audit;
    audit.plaintext_sum = std::move(plaintext);
    audit.noise_a = xi_a;
    audit.noise_b = xi_b;
    audit.aggregate = aggregate;
    audit.num_accepted = rec.accepted.size();
    rec.audit = std::move(audit);
  }
  const double weight_sum = rec.weight_sum;
  ServerState next = ApplyUpdate(state, cfg, weight_sum, aggregate);
  if (ctx.transcript) ctx.transcript->AddRound(std::move(rec));
  return next;
}

ServerState RoundLdp(const ServerState& state, const Population& pop,
                     const RoundConfig& cfg, RoundContext& ctx) {
  return PlaintextRound(Variant::kLdp, state, pop, cfg, ctx);
}

ServerState RoundNonPrivate(const ServerState& state, const Population& pop,
                            const RoundConfig& cfg, RoundContext& ctx) {
  return PlaintextRound(Variant::kNonPrivate, state, pop, cfg, ctx);
}

std::pair<double, double> ReportedEpsilon(const TrainConfig& cfg, long t,
                                          long max_benign_participation,
                                          double p_i) {
  const RoundConfig& rc = cfg.round;
  if (cfg.variant == Variant::kNonPrivate || !(rc.sigma > 0.0)) {
    return {kInf, kInf};
  }
  const double eps_server = EpsAtDelta(
      MuRecordServerCorrupted(p_i, static_cast<double>(max_benign_participation),
                              rc.sigma),
      cfg.delta);
  if (cfg.variant == Variant::kLdp) return {eps_server, eps_server};
  const double eps_client = EpsAtDelta(
      MuRecordClientsOnly(rc.q, p_i, static_cast<double>(t), rc.sigma),
      cfg.delta);
  return {eps_server, eps_client};
}

TrainResult Train(const TrainConfig& cfg, const Population& pop,
                  const Model& initial, const Dataset& clean_test,
                  const Dataset& triggered_test) {
  using Clock = std::chrono::steady_clock;
  TrainResult result;
  result.participation.assign(pop.size(), 0);

  TrustedDealer dealer(cfg.field, cfg.seed);
  bool attack_spent = false;
  RoundContext ctx;
  ctx.seed = cfg.seed;
  ctx.codec = FixedPointCodec(cfg.field, cfg.scale_bits);
  ctx.dealer = &dealer;
  ctx.transcript = &result.transcript;
  ctx.attack = pop.NumMalicious() > 0 ? &cfg.attack : nullptr;
  ctx.audit = cfg.audit;
  ctx.threads = cfg.threads;
  ctx.attack_spent = &attack_spent;

  // Accounting uses the first benign client's sampling rate; all benign
  // clients share it in generated populations.
  double p_i = 0.0;
  for (const Client& c : pop.clients) {
    if (!IsMalicious(c.kind)) {
      p_i = c.p_i;
      break;
    }
  }

  ServerState state{initial, 0};
  std::array<uint64_t, 3> bytes{};
  const int target = cfg.attack.target_label;
  const long eval_every = std::max<long>(1, cfg.eval_every);
  for (long t = 0; t < cfg.round.T; ++t) {
    const auto start = Clock::now();
    switch (cfg.variant) {
      case Variant::kPrecad:
        state = RoundPrecad(state, pop, cfg.round, ctx);
        break;
      case Variant::kLdp:
        state = RoundLdp(state, pop, cfg.round, ctx);
        break;
      case Variant::kNonPrivate:
        state = RoundNonPrivate(state, pop, cfg.round, ctx);
        break;
    }
    const RoundRecord& rec = result.transcript.rounds().back();
    for (int64_t i : rec.selected) ++result.participation[i];
    for (int k = 0; k < 3; ++k) bytes[k] += rec.bytes_sent[k];
    const double wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start)
            .count();

    const long done = t + 1;
    if (done % eval_every != 0 && done != cfg.round.T) continue;
    MetricsRow row;
    row.round = done;
    const EvalMetrics m =
        EvaluateModel(state.model, clean_test, triggered_test, target);
    row.main_acc = m.main_acc;
    row.backdoor_acc = m.backdoor_acc;
    long max_t_i = 0;
    for (size_t i = 0; i < pop.size(); ++i) {
      if (!IsMalicious(pop.clients[i].kind)) {
        max_t_i = std::max(max_t_i, result.participation[i]);
      }
    }
    std::tie(row.eps_server, row.eps_client) =
        ReportedEpsilon(cfg, done, max_t_i, p_i);
    row.max_t_i = max_t_i;
    row.bytes_sent = bytes;
    row.wall_ms = cfg.record_wall_time ? wall_ms : 0.0;
    result.history.push_back(row);
  }
  result.model = std::move(state.model);
  return result;
}

}  // namespace secfl
