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

#include "secfl/transcript.h"

#include <cstring>

#include "json.hpp"

namespace secfl {
namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

uint64_t FnvBytes(uint64_t h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

std::string_view MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kShareReceived:
      return "share_received";
    case MessageKind::kMaskedVector:
      return "masked_vector";
    case MessageKind::kVerdictBit:
      return "verdict_bit";
    case MessageKind::kNoisyAccumulator:
      return "noisy_accumulator";
    case MessageKind::kPlaintextUpdate:
      return "plaintext_update";
  }
  return "unknown";
}

std::string EndpointName(int64_t endpoint) {
  if (endpoint == kServerAEndpoint) return "server_a";
  if (endpoint == kServerBEndpoint) return "server_b";
  return "client_" + std::to_string(endpoint);
}

uint64_t Fnv1a(std::span<const FieldElement> values) {
  uint64_t h = kFnvOffset;
  for (FieldElement v : values) h = FnvBytes(h, &v.value, sizeof(v.value));
  return h;
}

uint64_t Fnv1a(std::span<const double> values) {
  uint64_t h = kFnvOffset;
  for (double v : values) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = FnvBytes(h, &bits, sizeof(bits));
  }
  return h;
}

void Transcript::Record(Message m) { messages_.push_back(m); }

std::set<MessageKind> Transcript::Kinds() const {
  std::set<MessageKind> kinds;
  for (const Message& m : messages_) kinds.insert(m.kind);
  return kinds;
}

std::vector<Message> Transcript::ViewOf(int64_t endpoint) const {
  std::vector<Message> out;
  for (const Message& m : messages_) {
    if (m.receiver == endpoint) out.push_back(m);
  }
  return out;
}

std::string Transcript::ToJsonLines() const {
  using nlohmann::json;
  std::string out;
  for (const RoundRecord& r : rounds_) {
    json verdicts = json::array();
    for (const auto& [client, ok] : r.verdicts) {
      verdicts.push_back({client, ok});
    }
    json j = {{"type", "round"},
              {"round", r.round},
              {"selected", r.selected},
              {"accepted", r.accepted},
              {"verdicts", verdicts},
              {"skipped", r.skipped},
              {"weight_sum", r.weight_sum},
              {"noise_seed_digest_a", r.noise_seed_digest_a},
              {"noise_seed_digest_b", r.noise_seed_digest_b},
              {"bytes_sent", r.bytes_sent}};
    out += j.dump();
    out += '\n';
  }
  for (const Message& m : messages_) {
    json j = {{"type", "message"},
              {"round", m.round},
              {"sender", EndpointName(m.sender)},
              {"receiver", EndpointName(m.receiver)},
              {"kind", MessageKindName(m.kind)},
              {"client", m.client},
              {"bytes", m.bytes},
              {"digest", m.digest}};
    out += j.dump();
    out += '\n';
  }
  for (const IdealCall& c : ideal_calls_) {
    json j = {{"type", "ideal_call"},
              {"round", c.round},
              {"client", c.client},
              {"functionality", c.functionality}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace secfl
