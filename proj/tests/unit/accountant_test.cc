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

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gtest/gtest.h"
#include "oracles.h"
#include "secfl/errors.h"
#include "secfl/rng.h"

namespace secfl {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

double OraclePhi(double x) {
  const Big v = Big(0.5) * boost::math::erfc(-Big(x) / sqrt(Big(2)));
  return v.convert_to<double>();
}

double OracleDelta(double mu, double eps) {
  const Big m(mu), e(eps);
  const Big sqrt2 = sqrt(Big(2));
  auto phi = [&](const Big& x) {
    return Big(0.5) * boost::math::erfc(-x / sqrt2);
  };
  return (phi(-e / m + m / 2) - exp(e) * phi(-e / m - m / 2))
      .convert_to<double>();
}

double OracleSubsampledMu(double rate, double T, double noise) {
  const Big n(noise);
  return (Big(rate) * sqrt(Big(T) * (exp(Big(1) / (n * n)) - 1)))
      .convert_to<double>();
}

TEST(NormalCdfTest, MatchesHighPrecisionOracle) {
  EXPECT_EQ(NormalCdf(0.0), 0.5);
  EXPECT_EQ(NormalCdf(std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_EQ(NormalCdf(-std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_NEAR(NormalCdf(1.0), 0.841344746068543, 1e-12);
  for (double x = -40.0; x <= 12.0; x += 0.0137) {
    ASSERT_NEAR(NormalCdf(x), OraclePhi(x), 1e-12) << x;
  }
}

TEST(MuTest, ServerCorrupted) {
  EXPECT_NEAR(MuRecordServerCorrupted(0.05, 500, 1.0).mu,
              OracleSubsampledMu(0.05, 500, 1.0), 1e-12);
  EXPECT_NEAR(MuRecordServerCorrupted(0.05, 500, 1.0).mu, 1.4656, 1e-4);
  EXPECT_EQ(MuRecordServerCorrupted(0.05, 0, 1.0).mu, 0.0);
  // Large sigma: mu ~ p_i sqrt(T_i) / sigma.
  EXPECT_NEAR(MuRecordServerCorrupted(0.05, 500, 1e4).mu,
              0.05 * std::sqrt(500.0) / 1e4, 1e-9);
  EXPECT_THROW(MuRecordServerCorrupted(0.05, 500, 0.0), DomainError);
}

TEST(MuTest, ClientsOnly) {
  EXPECT_NEAR(MuRecordClientsOnly(0.1, 0.05, 5000, 1.0).mu, 0.2848, 1e-4);
  EXPECT_NEAR(MuRecordClientsOnly(0.1, 0.05, 5000, 1.0).mu,
              OracleSubsampledMu(0.005, 5000, std::sqrt(2.0)), 1e-12);
  EXPECT_EQ(MuRecordClientsOnly(0.0, 0.05, 5000, 1.0).mu, 0.0);
  EXPECT_THROW(MuRecordClientsOnly(0.1, 0.05, 5000, 0.0), DomainError);
  for (double sigma : {0.5, 1.0, 2.0}) {
    EXPECT_LT(MuRecordClientsOnly(0.1, 0.05, 5000, sigma).mu,
              MuRecordServerCorrupted(0.05, 500, sigma).mu);
  }
}

TEST(MuTest, ClientLevel) {
  const double sigma_tilde = 4.0 * std::sqrt(2.0) / 30.0;
  const double oracle = OracleSubsampledMu(0.1, 5000, sigma_tilde);
  EXPECT_NEAR(MuClientLevel(0.1, 5000, 2.0, 2.0, 30.0).mu, oracle,
              1e-9 * oracle);
  // C = sqrt(2) sigma R makes the effective noise exactly 1.
  EXPECT_NEAR(MuClientLevel(0.1, 100, 1.5, 2.0, std::sqrt(2.0) * 3.0).mu,
              0.1 * std::sqrt(100 * std::expm1(1.0)), 1e-12);
  EXPECT_NEAR(MuClientLevel(0.1, 100, 1.0, 1e6, 1.0).mu,
              0.1 * 10.0 / (std::sqrt(2.0) * 1e6), 1e-12);
  EXPECT_THROW(MuClientLevel(0.1, 100, 1.0, 2.0, 0.0), DomainError);
}

TEST(GdpTest, ComposeAndGroup) {
  const std::vector<GdpMu> one = {GdpMu(0.7)};
  EXPECT_DOUBLE_EQ(GdpCompose(one).mu, 0.7);
  const std::vector<GdpMu> pyth = {GdpMu(3.0), GdpMu(4.0)};
  EXPECT_DOUBLE_EQ(GdpCompose(pyth).mu, 5.0);
  const std::vector<GdpMu> many(400, GdpMu(0.1));
  EXPECT_NEAR(GdpCompose(many).mu, 0.1 * 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(GdpGroup(GdpMu(0.5), 1).mu, 0.5);
  EXPECT_DOUBLE_EQ(GdpGroup(GdpMu(0.5), 2).mu, 1.0);
  EXPECT_THROW(GdpGroup(GdpMu(0.5), 0), DomainError);
  EXPECT_THROW(GdpMu(-1.0), DomainError);
}

TEST(DeltaTest, Examples) {
  for (double e : {0.0, 0.5, 3.0}) EXPECT_EQ(GdpToDpDelta(GdpMu(0.0), e), 0.0);
  for (double mu : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(GdpToDpDelta(GdpMu(mu), 0.0), 2.0 * OraclePhi(mu / 2) - 1.0,
                1e-14);
  }
  EXPECT_NEAR(GdpToDpDelta(GdpMu(1.0), 1.0), OracleDelta(1.0, 1.0), 1e-14);
  EXPECT_NEAR(GdpToDpDelta(GdpMu(1.0), 1.0), 0.12693, 1e-5);
  EXPECT_THROW(GdpToDpDelta(GdpMu(1.0), -0.1), DomainError);
}

TEST(DeltaTest, MatchesOracle) {
  Rng rng = Rng::Derive(21, Stream::kTest);
  for (int i = 0; i < 300; ++i) {
    const double mu = 0.05 + 5.0 * rng.Uniform();
    const double eps = 20.0 * rng.Uniform();
    const double oracle = OracleDelta(mu, eps);
    ASSERT_NEAR(GdpToDpDelta(GdpMu(mu), eps), oracle, 1e-13 + 1e-9 * oracle)
        << mu << " " << eps;
  }
}

TEST(DeltaTest, Monotonicity) {
  for (double mu = 0.1; mu < 6.0; mu += 0.3) {
    double prev = 2.0;
    for (double eps = 0.0; eps < 30.0; eps += 0.25) {
      const double d = GdpToDpDelta(GdpMu(mu), eps);
      ASSERT_GE(d, 0.0);
      ASSERT_LT(d, 1.0);
      if (d > 1e-300) ASSERT_LT(d, prev) << mu << " " << eps;
      prev = d;
      const double up = GdpToDpDelta(GdpMu(mu + 0.1), eps);
      if (up > 1e-300) ASSERT_GT(up, d);
    }
  }
}

TEST(EpsForDeltaTest, RoundTrip) {
  for (double mu : {0.05, 0.3, 1.0, 2.5, 6.0}) {
    for (double delta : {1e-3, 1e-5, 1e-9}) {
      if (delta >= GdpToDpDelta(GdpMu(mu), 0.0)) continue;
      const double eps = EpsForDelta(GdpMu(mu), delta);
      EXPECT_NEAR(GdpToDpDelta(GdpMu(mu), eps), delta, 1e-6 * delta);
    }
  }
  EXPECT_THROW(EpsForDelta(GdpMu(0.01), 0.5), DomainError);
  EXPECT_THROW(EpsForDelta(GdpMu(1.0), 0.0), DomainError);
  EXPECT_EQ(EpsAtDelta(GdpMu(0.0), 1e-5), 0.0);
}

TEST(EpsForDeltaTest, ReportedBudgetsAtFixedDelta) {
  // Server-corrupted accounting at q = 0.1, p_i = 0.05, T = 5000, T_i = qT.
  const double expected[] = {6.8, 3.5, 2.4};
  const double sigmas[] = {1.0, 1.5, 2.0};
  for (int k = 0; k < 3; ++k) {
    const double eps =
        EpsForDelta(MuRecordServerCorrupted(0.05, 500, sigmas[k]), 1e-5);
    EXPECT_NEAR(eps, expected[k], 0.4) << "sigma " << sigmas[k];
  }
}

TEST(RobustnessTest, Degenerate) {
  const RobustnessBounds none = ComputeRobustnessBounds({0.3, 1.0, 0, GdpMu(2.0)});
  EXPECT_EQ(none.lower, 0.3);
  EXPECT_EQ(none.upper, 0.3);
  const RobustnessBounds zero_loss =
      ComputeRobustnessBounds({0.0, 1.0, 2, GdpMu(0.5)});
  EXPECT_EQ(zero_loss.lower, 0.0);
  EXPECT_THROW(ComputeRobustnessBounds({1.5, 1.0, 1, GdpMu(0.5)}),
               DomainError);
  // No meaningful privacy: the bounds collapse to [0, B].
  for (double L : {0.0, 0.4}) {
    const RobustnessBounds loose =
        ComputeRobustnessBounds({L, 1.0, 1, GdpMu(1e20)});
    EXPECT_NEAR(loose.lower, 0.0, 1e-12);
    EXPECT_NEAR(loose.upper, 1.0, 1e-12);
  }
}

TEST(RobustnessTest, MatchesBruteForceGrid) {
  const RobustnessBounds b = ComputeRobustnessBounds({0.2, 1.0, 1, GdpMu(0.5)});
  const RobustnessBounds g = testing::GridBounds(0.2, 1.0, 0.5, 1000000);
  EXPECT_NEAR(b.lower, g.lower, 1e-6);
  EXPECT_NEAR(b.upper, g.upper, 1e-6);

  Rng rng = Rng::Derive(22, Stream::kTest);
  for (int i = 0; i < 10; ++i) {
    const double B = 0.5 + 4.5 * rng.Uniform();
    const double L = B * rng.Uniform();
    const int K = 1 + static_cast<int>(rng.UniformBelow(4));
    const double mu = 0.01 + 2.0 * rng.Uniform();
    const RobustnessBounds lib = ComputeRobustnessBounds({L, B, K, GdpMu(mu)});
    const RobustnessBounds grid = testing::GridBounds(L, B, K * mu, 1000000);
    EXPECT_NEAR(lib.lower, grid.lower, 1e-6) << L << " " << B << " " << K * mu;
    EXPECT_NEAR(lib.upper, grid.upper, 1e-6) << L << " " << B << " " << K * mu;
  }
}

TEST(RobustnessTest, OrderedAndMonotoneInK) {
  Rng rng = Rng::Derive(23, Stream::kTest);
  for (int i = 0; i < 100; ++i) {
    const double B = 1.0;
    const double L = rng.Uniform();
    const double mu = 0.01 + rng.Uniform();
    double prev_lower = L, prev_upper = L;
    for (int K = 0; K <= 5; ++K) {
      const RobustnessBounds r = ComputeRobustnessBounds({L, B, K, GdpMu(mu)});
      ASSERT_LE(r.lower, L);
      ASSERT_GE(r.upper, L);
      ASSERT_LE(r.lower, prev_lower + 1e-12);
      ASSERT_GE(r.upper, prev_upper - 1e-12);
      prev_lower = r.lower;
      prev_upper = r.upper;
    }
  }
}

TEST(PrivacyReportTest, CurvesAreOrderedAndMonotone) {
  PrivacyParams p;
  p.q = 0.1;
  p.p_i = 0.05;
  p.T = 2000;
  p.sigma = 1.0;
  const std::vector<PrivacyReportRow> rows = PrivacyReport(p, 1e-5, 50);
  ASSERT_EQ(rows.back().t, 2000);
  double prev_s = 0.0, prev_c = 0.0;
  for (const PrivacyReportRow& r : rows) {
    EXPECT_GE(r.eps_server, r.eps_client) << r.t;
    EXPECT_GE(r.eps_server, prev_s);
    EXPECT_GE(r.eps_client, prev_c);
    prev_s = r.eps_server;
    prev_c = r.eps_client;
  }
  EXPECT_NEAR(rows.back().mu_server.mu,
              MuRecordServerCorrupted(0.05, 200, 1.0).mu, 1e-12);
}

TEST(PrivacyReportTest, UsesRealizedParticipation) {
  PrivacyParams p;
  p.T = 4;
  const std::vector<double> realized = {0, 1, 1, 2, 3};
  const std::vector<PrivacyReportRow> rows = PrivacyReport(p, 1e-5, 1, realized);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(rows[3].mu_server.mu,
                   MuRecordServerCorrupted(p.p_i, 3, p.sigma).mu);
  const std::vector<double> bad = {0, 1};
  EXPECT_THROW(PrivacyReport(p, 1e-5, 1, bad), DomainError);
  PrivacyParams over = p;
  over.T_i = 5;
  EXPECT_THROW(over.Validate(), DomainError);
}

}  // namespace
}  // namespace secfl
