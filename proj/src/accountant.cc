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

#include "secfl/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "secfl/errors.h"

namespace secfl {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// log Phi(x), finite for all x where Phi(x) does not underflow.
double LogNormalCdf(double x) {
  const double c = 0.5 * std::erfc(-x * kInvSqrt2);
  return c > 0.0 ? std::log(c) : -std::numeric_limits<double>::infinity();
}

void RequirePositive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw DomainError(std::string(name) + " must be positive, got " +
                      std::to_string(v));
  }
}

void RequireProbability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(v));
  }
}

// Subsampled Gaussian mechanism under T-fold composition:
// rate * sqrt(T * (e^{1/noise^2} - 1)).
double SubsampledMu(double rate, double T, double noise) {
  if (rate == 0.0 || T == 0.0) return 0.0;
  return rate * std::sqrt(T * std::expm1(1.0 / (noise * noise)));
}

template <typename F>
double GoldenSectionMin(F f, double lo, double hi, int iters = 200) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, b); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// min over [0, hi] of f: dense grid, then golden-section refinement inside
// the bracket around the best grid point.
template <typename F>
double MinimizeOnInterval(F f, double hi) {
  constexpr int kGrid = 4000;
  const double h = hi / kGrid;
  int best = 0;
  double best_val = f(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = f(i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = std::max(0, best - 1) * h;
  const double up = std::min(kGrid, best + 1) * h;
  return std::min(best_val, GoldenSectionMin(f, lo, up));
}

}  // namespace

GdpMu::GdpMu(double value) : mu(value) {
  if (!(value >= 0.0)) {
    throw DomainError("GDP parameter mu must be non-negative, got " +
                      std::to_string(value));
  }
}

void PrivacyParams::Validate() const {
  RequireProbability(q, "q");
  RequireProbability(p_i, "p_i");
  if (T < 0) throw DomainError("T must be non-negative");
  if (T_i && !(*T_i >= 0.0 && *T_i <= static_cast<double>(T))) {
    throw DomainError("T_i must lie in [0, T]");
  }
  RequirePositive(sigma, "sigma");
  RequirePositive(R, "R");
  RequirePositive(C, "C");
}

double NormalCdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

GdpMu MuRecordServerCorrupted(double p_i, double T_i, double sigma) {
  RequireProbability(p_i, "p_i");
  RequirePositive(sigma, "sigma");
  if (!(T_i >= 0.0)) throw DomainError("T_i must be non-negative");
  return GdpMu(SubsampledMu(p_i, T_i, sigma));
}

GdpMu MuRecordClientsOnly(double q, double p_i, double T, double sigma) {
  RequireProbability(q, "q");
  RequireProbability(p_i, "p_i");
  RequirePositive(sigma, "sigma");
  if (!(T >= 0.0)) throw DomainError("T must be non-negative");
  // Both server noises count: variance 2 (R sigma)^2 against sensitivity R.
  return GdpMu(SubsampledMu(q * p_i, T, std::sqrt(2.0) * sigma));
}

GdpMu MuClientLevel(double q, double T, double sigma, double R, double C) {
  RequireProbability(q, "q");
  RequirePositive(sigma, "sigma");
  RequirePositive(R, "R");
  RequirePositive(C, "C");
  if (!(T >= 0.0)) throw DomainError("T must be non-negative");
  const double sigma_tilde = std::sqrt(2.0) * sigma * R / C;
  return GdpMu(SubsampledMu(q, T, sigma_tilde));
}

GdpMu GdpCompose(std::span<const GdpMu> mus) {
  double sum_sq = 0.0;
  for (const GdpMu& m : mus) sum_sq += m.mu * m.mu;
  return GdpMu(std::sqrt(sum_sq));
}

GdpMu GdpGroup(GdpMu mu, int K) {
  if (K < 1) throw DomainError("group size K must be >= 1");
  return GdpMu(K * mu.mu);
}

double GdpToDpDelta(GdpMu mu, double eps) {
  if (!(eps >= 0.0)) {
    throw DomainError("eps must be non-negative, got " + std::to_string(eps));
  }
  if (mu.mu == 0.0) return 0.0;
  if (std::isinf(mu.mu)) return 1.0;
  if (std::isinf(eps)) return 0.0;
  const double first = NormalCdf(-eps / mu.mu + mu.mu / 2.0);
  const double log_second = eps + LogNormalCdf(-eps / mu.mu - mu.mu / 2.0);
  const double second = std::exp(log_second);
  return std::clamp(first - second, 0.0, 1.0);
}

double EpsWhereDeltaBelow(GdpMu mu, double floor) {
  if (GdpToDpDelta(mu, 0.0) <= floor) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (GdpToDpDelta(mu, hi) > floor) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw DomainError("delta floor unreachable");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (GdpToDpDelta(mu, mid) > floor ? lo : hi) = mid;
  }
  return hi;
}

double EpsForDelta(GdpMu mu, double delta_target) {
  const double delta0 = GdpToDpDelta(mu, 0.0);
  if (!(delta_target > 0.0 && delta_target < delta0)) {
    throw DomainError("delta target " + std::to_string(delta_target) +
                      " outside (0, delta(0) = " + std::to_string(delta0) +
                      ")");
  }
  return EpsWhereDeltaBelow(mu, delta_target);
}

double EpsAtDelta(GdpMu mu, double delta_target) {
  if (!(delta_target > 0.0)) throw DomainError("delta target must be > 0");
  if (GdpToDpDelta(mu, 0.0) <= delta_target) return 0.0;
  return EpsForDelta(mu, delta_target);
}

RobustnessBounds ComputeRobustnessBounds(const RobustnessInputs& in) {
  RequirePositive(in.B, "B");
  if (!(in.L >= 0.0 && in.L <= in.B)) {
    throw DomainError("L must lie in [0, B]");
  }
  if (in.K < 0) throw DomainError("K must be non-negative");
  if (in.K == 0 || in.mu.mu == 0.0) return {in.L, in.L};

  const GdpMu group = GdpGroup(in.mu, in.K);
  const double L = in.L, B = in.B;
  // Past ln(B/L) the e^eps L term alone exceeds B and e^-eps L is negligible,
  // so the search never needs to go further than that plus a margin. Very
  // large mu never gets delta down to the floor at all.
  double eps_max = 1e7;
  if (L > 0.0) eps_max = 40.0 + std::max(0.0, std::log(B / L));
  try {
    eps_max = std::min(eps_max, EpsWhereDeltaBelow(group, 1e-16));
  } catch (const DomainError&) {
  }
  eps_max = std::max(eps_max, 1e-9);

  const double upper = MinimizeOnInterval(
      [&](double e) { return std::exp(e) * L + B * GdpToDpDelta(group, e); },
      eps_max);
  const double neg_lower = MinimizeOnInterval(
      [&](double e) {
        return -std::exp(-e) * (L - B * GdpToDpDelta(group, e));
      },
      eps_max);
  return {std::max(0.0, -neg_lower), std::min(B, upper)};
}

std::vector<PrivacyReportRow> PrivacyReport(const PrivacyParams& params,
                                            double delta_target, long stride,
                                            std::span<const double> realized_T_i) {
  params.Validate();
  if (stride < 1) throw DomainError("stride must be >= 1");
  if (!realized_T_i.empty() &&
      realized_T_i.size() != static_cast<size_t>(params.T) + 1) {
    throw DomainError("realized T_i series must have T + 1 entries");
  }
  auto row_at = [&](long t) {
    PrivacyReportRow row;
    row.t = t;
    const double t_i = realized_T_i.empty() ? params.q * t : realized_T_i[t];
    row.mu_server = MuRecordServerCorrupted(params.p_i, t_i, params.sigma);
    row.mu_client = MuRecordClientsOnly(params.q, params.p_i,
                                        static_cast<double>(t), params.sigma);
    row.eps_server = EpsAtDelta(row.mu_server, delta_target);
    row.eps_client = EpsAtDelta(row.mu_client, delta_target);
    return row;
  };
  std::vector<PrivacyReportRow> rows;
  for (long t = stride; t <= params.T; t += stride) rows.push_back(row_at(t));
  if (params.T > 0 && (rows.empty() || rows.back().t != params.T)) {
    rows.push_back(row_at(params.T));
  }
  return rows;
}

}  // namespace secfl
