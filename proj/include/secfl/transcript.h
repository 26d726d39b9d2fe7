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

// Per-round views of every party. The transcript is what the servers observe
// (plus an audit channel for tests that only the simulator can see).

#ifndef SECFL_TRANSCRIPT_H_
#define SECFL_TRANSCRIPT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secfl/ffield.h"

namespace secfl {

enum class MessageKind {
  kShareReceived,     // client -> server: one additive share of an update
  kMaskedVector,      // server <-> server: [b]_j = [x]_j - [a]_j
  kVerdictBit,        // server <-> server: share of the validation bit
  kNoisyAccumulator,  // server <-> server: accumulator plus encoded noise
  kPlaintextUpdate,   // client -> server, baselines only
};

std::string_view MessageKindName(MessageKind kind);

// Endpoints: clients are >= 0, servers are negative.
inline constexpr int64_t kServerAEndpoint = -1;
inline constexpr int64_t kServerBEndpoint = -2;
std::string EndpointName(int64_t endpoint);

struct Message {
  long round = 0;
  int64_t sender = 0;
  int64_t receiver = 0;
  MessageKind kind = MessageKind::kShareReceived;
  int64_t client = -1;  // client the payload concerns, -1 for aggregates
  uint64_t bytes = 0;
  uint64_t digest = 0;  // FNV-1a of the payload
};

// A step that ran inside an idealized functionality rather than as a real
// two-party protocol.
struct IdealCall {
  long round = 0;
  int64_t client = -1;
  std::string functionality;
};

// Plaintext quantities visible only to the simulator, recorded on request.
struct RoundAudit {
  std::vector<double> plaintext_sum;  // sum of accepted real-valued updates
  std::vector<double> noise_a;        // server noise (or summed client noise)
  std::vector<double> noise_b;
  std::vector<double> aggregate;      // what the servers decoded
  size_t num_accepted = 0;
};

struct RoundRecord {
  long round = 0;
  std::vector<int64_t> selected;
  std::vector<int64_t> accepted;
  std::vector<std::pair<int64_t, bool>> verdicts;
  bool skipped = false;
  double weight_sum = 0.0;  // sum of p_i |D_i| over accepted clients
  // Sealed noise seeds: only a digest is logged.
  uint64_t noise_seed_digest_a = 0;
  uint64_t noise_seed_digest_b = 0;
  // Bytes sent this round by {all clients, S_A, S_B}.
  std::array<uint64_t, 3> bytes_sent{};
  std::optional<RoundAudit> audit;
};

class Transcript {
 public:
  void Record(Message m);
  void RecordIdeal(IdealCall call) { ideal_calls_.push_back(std::move(call)); }
  void AddRound(RoundRecord r) { rounds_.push_back(std::move(r)); }

  const std::vector<Message>& messages() const { return messages_; }
  const std::vector<IdealCall>& ideal_calls() const { return ideal_calls_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::vector<RoundRecord>& mutable_rounds() { return rounds_; }

  std::set<MessageKind> Kinds() const;
  // Messages a given endpoint received.
  std::vector<Message> ViewOf(int64_t endpoint) const;

  // One JSON object per line: rounds, then messages, then ideal calls. Audit
  // payloads are omitted.
  std::string ToJsonLines() const;

 private:
  std::vector<Message> messages_;
  std::vector<IdealCall> ideal_calls_;
  std::vector<RoundRecord> rounds_;
};

uint64_t Fnv1a(std::span<const FieldElement> values);
uint64_t Fnv1a(std::span<const double> values);

}  // namespace secfl

#endif  // SECFL_TRANSCRIPT_H_
