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

// Gaussian-DP accounting for the two-server protocol and the loss bounds it
// implies under model poisoning.
//
// Record-level privacy of a benign client has two cases:
//   one server corrupted:   mu = p_i * sqrt(T_i * (e^{1/sigma^2} - 1))
//   only clients corrupted: mu = q * p_i * sqrt(T * (e^{1/(2 sigma^2)} - 1))
// Client-level privacy (all clients, including malicious ones) uses the
// effective multiplier sqrt(2) * sigma * R / C and drives the robustness
// bounds via group privacy over K attackers.

#ifndef SECFL_ACCOUNTANT_H_
#define SECFL_ACCOUNTANT_H_

#include <optional>
#include <span>
#include <vector>

namespace secfl {

struct GdpMu {
  double mu = 0.0;

  constexpr GdpMu() = default;
  // Throws DomainError on negative or NaN input.
  explicit GdpMu(double value);
};

struct DpPoint {
  double eps = 0.0;
  double delta = 0.0;
};

struct PrivacyParams {
  double q = 0.1;       // client selection probability
  double p_i = 0.05;    // record sampling probability
  long T = 0;           // total global iterations
  // Iterations the client actually joined. When unset, the expectation q*T is
  // used.
  std::optional<double> T_i;
  double sigma = 1.0;   // noise multiplier
  double R = 2.0;       // record clip norm
  double C = 30.0;      // client clip norm

  double EffectiveParticipation() const { return T_i ? *T_i : q * T; }
  // Throws DomainError on out-of-range fields.
  void Validate() const;
};

struct RobustnessInputs {
  double L = 0.0;    // expected loss without attack, in [0, B]
  double B = 1.0;    // loss upper bound
  int K = 0;         // number of malicious clients
  GdpMu mu;          // client-level GDP parameter
};

struct RobustnessBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Standard normal CDF, absolute error below 1e-12.
double NormalCdf(double x);

GdpMu MuRecordServerCorrupted(double p_i, double T_i, double sigma);
GdpMu MuRecordClientsOnly(double q, double p_i, double T, double sigma);
GdpMu MuClientLevel(double q, double T, double sigma, double R, double C);

// sqrt(sum mu_i^2).
GdpMu GdpCompose(std::span<const GdpMu> mus);
// K * mu for a group of K >= 1. Throws DomainError for K < 1.
GdpMu GdpGroup(GdpMu mu, int K);

// delta(eps) = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2); zero for
// mu = 0. Throws DomainError for eps < 0.
double GdpToDpDelta(GdpMu mu, double eps);

// Smallest eps >= 0 with delta(eps) <= target, by bisection on the strictly
// decreasing delta(eps). Requires 0 < target < delta(0); throws DomainError
// otherwise.
double EpsForDelta(GdpMu mu, double delta_target);

// Like EpsForDelta but total: returns 0 when delta(0) already meets the target
// (including mu = 0).
double EpsAtDelta(GdpMu mu, double delta_target);

// Upper bound inf_eps e^eps L + B delta_K(eps) and lower bound
// sup_eps e^{-eps} (L - B delta_K(eps)) with delta_K computed at K * mu.
// Dense grid followed by golden-section refinement around the best point.
RobustnessBounds ComputeRobustnessBounds(const RobustnessInputs& in);

// Smallest eps at which delta(eps) drops below `floor`.
double EpsWhereDeltaBelow(GdpMu mu, double floor);

struct PrivacyReportRow {
  long t = 0;
  GdpMu mu_server;
  GdpMu mu_client;
  double eps_server = 0.0;
  double eps_client = 0.0;
};

// Both corruption cases at every t = 1..T (step `stride`, always including
// T). Case 1 uses the expected participation q*t unless `realized_T_i`
// supplies per-iteration counts (size T + 1, cumulative).
std::vector<PrivacyReportRow> PrivacyReport(
    const PrivacyParams& params, double delta_target, long stride = 1,
    std::span<const double> realized_T_i = {});

}  // namespace secfl

#endif  // SECFL_ACCOUNTANT_H_
