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

// Round orchestration for the two-server protocol and its baselines: client
// selection, local updates, share collection, secure validation, noisy
// aggregation and the global update, plus the model-replacement attacker.

#ifndef SECFL_PROTOCOL_H_
#define SECFL_PROTOCOL_H_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "secfl/ffield.h"
#include "secfl/learn.h"
#include "secfl/mpc.h"
#include "secfl/transcript.h"

namespace secfl {

class Rng;

enum class Variant { kPrecad, kLdp, kNonPrivate };

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);

enum class ClientKind {
  kBenign,
  kMaliciousBackdoor,
  kLdpBenign,
  kNonPrivateBenign,
};

std::string_view ClientKindName(ClientKind kind);

inline bool IsMalicious(ClientKind kind) {
  return kind == ClientKind::kMaliciousBackdoor;
}

struct RoundConfig {
  double q = 0.1;       // client selection probability
  double eta = 0.1;     // global learning rate
  double sigma = 1.0;   // noise multiplier
  double R = 2.0;       // record clip norm
  double C = 30.0;      // client clip norm
  double slack = kDefaultValidationSlack;
  long T = 100;
  // Client-level clipping and secure validation. Disabling both gives the
  // privacy-only protocol used for utility comparisons.
  bool client_clipping = true;
  bool validation = true;
  // LDP baseline: clip submissions to C after the local noise and let the
  // server drop anything above C + slack.
  bool ldp_post_clip = false;
};

struct Client {
  int64_t id = 0;
  ClientKind kind = ClientKind::kBenign;
  Dataset data;
  Dataset poisoned;  // malicious clients: benign + backdoor mix
  double p_i = 0.05;

  // p_i |D_i|, this client's aggregation weight.
  double Weight() const { return p_i * static_cast<double>(data.size()); }
};

struct Population {
  std::vector<Client> clients;

  size_t size() const { return clients.size(); }
  size_t NumMalicious() const;
};

struct AttackSpec {
  Trigger trigger;
  int target_label = 0;
  double poison_fraction = 0.5;
  int local_iters = 5;     // L
  double lr = 0.02;        // attacker learning rate
  // Attack every round a malicious client is selected, or only once.
  bool single_shot = false;
  long start_round = 0;
  // Clip the replacement update to C wherever the server would check it.
  bool respect_bound = true;
  // When > 0, rescale the malicious submission to this multiple of C
  // regardless of respect_bound (probes validation soundness).
  double oversize_factor = 0.0;
};

struct ServerState {
  Model model;
  long t = 0;
};

// Shared per-run machinery for a round.
struct RoundContext {
  uint64_t seed = 0;
  FixedPointCodec codec;
  TrustedDealer* dealer = nullptr;    // required by the secure variant
  Transcript* transcript = nullptr;   // optional
  const AttackSpec* attack = nullptr; // optional
  bool audit = false;
  int threads = 1;
  // Set by the attacker bookkeeping in single-shot mode.
  bool* attack_spent = nullptr;
};

// Independent inclusion of each of n clients with probability q.
std::vector<int64_t> SelectClients(size_t n, double q, Rng& rng);

// (theta* - theta_t) / (eta * weight * K_active), clipped to norm C (pass
// infinity to skip clipping).
std::vector<double> MaliciousUpdate(std::span<const double> theta_t,
                                    std::span<const double> theta_star,
                                    double eta, double weight, int K_active,
                                    double C);

// L full-batch gradient-descent steps at rate lr on the poisoned mix.
Model TrainBackdoorModel(const Model& theta_t, const Dataset& poisoned,
                         int local_iters, double lr);

// One round of each protocol variant. All return the next server state and,
// when ctx.transcript is set, append the round's record and messages.
ServerState RoundPrecad(const ServerState& state, const Population& pop,
                        const RoundConfig& cfg, RoundContext& ctx);
ServerState RoundLdp(const ServerState& state, const Population& pop,
                     const RoundConfig& cfg, RoundContext& ctx);
ServerState RoundNonPrivate(const ServerState& state, const Population& pop,
                            const RoundConfig& cfg, RoundContext& ctx);

struct MetricsRow {
  long round = 0;
  double main_acc = 0.0;
  double backdoor_acc = 0.0;
  // +infinity when the variant offers no record-level guarantee.
  double eps_server = std::numeric_limits<double>::infinity();
  double eps_client = std::numeric_limits<double>::infinity();
  // Largest realized participation count among benign clients so far.
  long max_t_i = 0;
  // Cumulative bytes sent by {all clients, S_A, S_B}.
  std::array<uint64_t, 3> bytes_sent{};
  double wall_ms = 0.0;
};

struct TrainConfig {
  Variant variant = Variant::kPrecad;
  RoundConfig round;
  AttackSpec attack;
  double delta = 1e-5;
  long eval_every = 10;
  uint64_t seed = 1;
  PrimeField field;
  int scale_bits = FixedPointCodec::kDefaultScaleBits;
  bool audit = false;
  int threads = 1;
  bool record_wall_time = false;
};

struct TrainResult {
  Model model;
  std::vector<MetricsRow> history;
  Transcript transcript;
  // Rounds each client participated in (realized T_i).
  std::vector<long> participation;
};

// Runs cfg.round.T rounds of cfg.variant from `initial`, evaluating every
// eval_every rounds and after the last round.
TrainResult Train(const TrainConfig& cfg, const Population& pop,
                  const Model& initial, const Dataset& clean_test,
                  const Dataset& triggered_test);

// (eps_server, eps_client) for a variant after `t` rounds, given the largest
// realized participation count among benign clients.
std::pair<double, double> ReportedEpsilon(const TrainConfig& cfg, long t,
                                          long max_benign_participation,
                                          double p_i);

}  // namespace secfl

#endif  // SECFL_PROTOCOL_H_
