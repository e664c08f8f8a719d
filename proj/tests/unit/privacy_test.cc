//
// Copyright 2026 The fedlmm Authors
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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fedlmm/errors.h"
#include "fedlmm/privacy.h"
#include "fedlmm/summary.h"
#include "oracle.h"

namespace fedlmm {
namespace {

SiteSummary SmallSummary(int n, int p, std::uint64_t seed,
                         const std::string& id = "site") {
  Rng rng(seed);
  SiteData s;
  s.site_id = id;
  s.y.resize(n);
  s.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    s.y(i) = rng.Normal();
    for (int j = 0; j < p; ++j) s.X(i, j) = rng.Bernoulli(0.5) ? 1.0 : 0.0;
  }
  return ComputeSummary(s);
}

TEST(GaussianSigma, ClosedForm) {
  EXPECT_DOUBLE_EQ(GaussianSigma(1.0, 0.01, 1.0), std::sqrt(2.0 * std::log(125.0)));
  EXPECT_DOUBLE_EQ(GaussianSigma(2.0, 0.01, 6.0),
                   6.0 * std::sqrt(2.0 * std::log(125.0)) / 2.0);
  EXPECT_THROW(PrivacyBudget::Make(0.0, 0.01, 1.0), ValidationError);
  EXPECT_THROW(PrivacyBudget::Make(1.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(PrivacyBudget::Make(1.0, 0.0, 1.0), ValidationError);
  EXPECT_THROW(PrivacyBudget::Make(1.0, 0.01, -1.0), ValidationError);
}

TEST(PrivacyBudget, ValidateRecomputesSigma) {
  PrivacyBudget b = PrivacyBudget::Make(3.0, 1e-4, 2.0);
  EXPECT_NO_THROW(b.Validate());
  b.sigma_dp *= 1.0 + 1e-6;
  EXPECT_THROW(b.Validate(), ValidationError);
}

TEST(Sensitivity, BinaryGram) {
  EXPECT_EQ(SensitivityBinaryGram(3), 6.0);
  EXPECT_EQ(SensitivityBinaryGram(1), 2.0);
  EXPECT_THROW(SensitivityBinaryGram(0), ValidationError);
}

TEST(Sensitivity, BinaryGramBoundHoldsExhaustively) {
  // Replacing a (1,1) row by (0,0) moves the Gram by the all-ones 2x2
  // matrix, Frobenius norm 2; no single-row change does more.
  EXPECT_EQ(oracle::BruteBinaryGramSensitivity(2, 2), 2.0);
  for (int p = 1; p <= 3; ++p) {
    for (int n = 1; n <= 3; ++n) {
      EXPECT_LE(oracle::BruteBinaryGramSensitivity(n, p),
                SensitivityBinaryGram(p))
          << n << "x" << p;
    }
  }
}

ModelSpec UnitBox(int p, Interval y) {
  ModelSpec spec;
  spec.covariate_bounds.assign(p, Interval{0.0, 1.0});
  spec.outcome_bound = y;
  return spec;
}

TEST(Sensitivity, BoundedReducesToBinaryGram) {
  for (int p = 1; p <= 6; ++p) {
    EXPECT_DOUBLE_EQ(SensitivityBounded(UnitBox(p, {0.0, 0.0}), 10, false),
                     SensitivityBinaryGram(p));
  }
}

TEST(Sensitivity, BoundedSingleRecordCorners) {
  EXPECT_DOUBLE_EQ(SensitivityBounded(UnitBox(1, {0.0, 1.0}), 1),
                   2.0 * std::sqrt(2.0) * 2.0);
}

TEST(Sensitivity, BoundedTBlockScalesLinearlyInN) {
  const ModelSpec spec = UnitBox(3, {-2.0, 5.0});
  const double s = SensitivityBounded(spec, 1, false);
  auto t_block = [&](std::int64_t n) {
    const double total = SensitivityBounded(spec, n);
    return std::sqrt(total * total - s * s);
  };
  EXPECT_NEAR(t_block(40) / t_block(20), 2.0, 1e-12);
  EXPECT_NEAR(t_block(7) / t_block(1), 7.0, 1e-12);
}

TEST(Sensitivity, BoundedNeedsBounds) {
  ModelSpec spec = UnitBox(2, {0.0, 1.0});
  spec.outcome_bound.reset();
  EXPECT_THROW(SensitivityBounded(spec, 5), ValidationError);
  EXPECT_THROW(SensitivityBounded(ModelSpec{}, 5), ValidationError);
}

TEST(Calibrate, DimensionAdjustedExamples) {
  CalibrationRule rule;
  rule.epsilon0 = 2.0;
  const PrivacyBudget b = Calibrate(rule, 0.01, 7);
  EXPECT_NEAR(b.sigma_dp, std::sqrt(2.0 * std::log(125.0)) / 2.0, 1e-14);
  EXPECT_EQ(b.epsilon, 28.0);
  EXPECT_EQ(b.delta_f, 14.0);
  for (int p = 1; p <= 10; ++p) {
    EXPECT_NEAR(Calibrate(rule, 0.01, p).sigma_dp, b.sigma_dp, 1e-14);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double e0 : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    rule.epsilon0 = e0;
    const double s = Calibrate(rule, 0.01, 3).sigma_dp;
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_THROW(Calibrate(rule, 1.5, 3), ValidationError);
  rule.epsilon0 = 0.0;
  EXPECT_THROW(Calibrate(rule, 0.01, 3), ValidationError);
}

TEST(Calibrate, FixedModeReproducesDimensionAdjusted) {
  for (int p : {1, 3, 7}) {
    for (double e0 : {0.5, 2.0, 16.0}) {
      CalibrationRule adj;
      adj.epsilon0 = e0;
      CalibrationRule fixed;
      fixed.mode = CalibrationMode::kFixedEpsilon;
      fixed.epsilon = 2.0 * p * e0;
      fixed.delta_f = 2.0 * p;
      EXPECT_EQ(Calibrate(adj, 1e-3, p).sigma_dp,
                Calibrate(fixed, 1e-3, p).sigma_dp);
    }
  }
}

// Empirical noise SD on the diagonal and off the diagonal of S.
void CheckNoiseSd(double epsilon0) {
  const SiteSummary base = SmallSummary(5, 2, 1);
  CalibrationRule rule;
  rule.epsilon0 = epsilon0;
  const PrivacyBudget b = Calibrate(rule, 0.01, 2);
  const int draws = 100000;
  double diag_sq = 0.0, off_sq = 0.0, diag_sum = 0.0, off_sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const SiteSummary out =
        Privatize(base, b, PrivatizationScope::Full(), 1000 + i);
    const double d = out.S(1, 1) - base.S(1, 1);
    const double o = out.S(1, 2) - base.S(1, 2);
    diag_sum += d;
    off_sum += o;
    diag_sq += d * d;
    off_sq += o * o;
  }
  const double sd_diag = std::sqrt(diag_sq / draws);
  const double sd_off = std::sqrt(off_sq / draws);
  EXPECT_NEAR(sd_diag / b.sigma_dp, 1.0, 0.02) << epsilon0;
  EXPECT_NEAR(sd_off / (b.sigma_dp / std::sqrt(2.0)), 1.0, 0.02) << epsilon0;
  EXPECT_LE(std::abs(diag_sum / draws), 3.0 * b.sigma_dp / std::sqrt(draws));
  EXPECT_LE(std::abs(off_sum / draws), 3.0 * b.sigma_dp / std::sqrt(draws));
}

TEST(Privatize, NoiseStandardDeviationEpsilon2) { CheckNoiseSd(2.0); }
TEST(Privatize, NoiseStandardDeviationEpsilon8) { CheckNoiseSd(8.0); }

TEST(Privatize, NoiseIsUnbiasedEntrywise) {
  const SiteSummary base = SmallSummary(4, 2, 2);
  const PrivacyBudget b = PrivacyBudget::Make(1.0, 0.01, 1.0);
  const int draws = 100000;
  Eigen::MatrixXd sum_s = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd sum_t = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < draws; ++i) {
    const SiteSummary out = Privatize(base, b, PrivatizationScope::Full(), i);
    sum_s += out.S - base.S;
    sum_t += out.T - base.T;
  }
  const double bound = 3.0 * b.sigma_dp / std::sqrt(draws);
  EXPECT_LE((sum_s / draws).cwiseAbs().maxCoeff(), bound);
  EXPECT_LE((sum_t / draws).cwiseAbs().maxCoeff(), bound);
}

TEST(Privatize, OutputIsSymmetricAndCarriesBudget) {
  const SiteSummary base = SmallSummary(6, 4, 3);
  const PrivacyBudget b = PrivacyBudget::Make(2.0, 1e-4, 8.0);
  const SiteSummary out = Privatize(base, b, PrivatizationScope::Full(), 5);
  EXPECT_EQ(out.S, out.S.transpose());
  EXPECT_EQ(out.T, out.T.transpose());
  EXPECT_TRUE(out.privatized);
  ASSERT_TRUE(out.budget.has_value());
  EXPECT_EQ(out.budget->sigma_dp, GaussianSigma(2.0, 1e-4, 8.0));
  EXPECT_NO_THROW(ValidateSummary(out));
}

TEST(Privatize, VanishingNoiseLeavesInput) {
  const SiteSummary base = SmallSummary(6, 3, 4);
  CalibrationRule rule;
  rule.epsilon0 = 1e9;
  const SiteSummary out =
      Privatize(base, Calibrate(rule, 0.01, 3), PrivatizationScope::Full(), 1);
  EXPECT_LE((out.S - base.S).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((out.T - base.T).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Privatize, SubsetScopeMasksNonSensitiveEntries) {
  const SiteSummary base = SmallSummary(10, 6, 5);
  const PrivacyBudget b = PrivacyBudget::Make(1.0, 0.01, 12.0);
  const SiteSummary out =
      Privatize(base, b, PrivatizationScope::Subset({4, 5, 6}), 9);
  const std::vector<std::pair<int, int>> fixed = {
      {1, 2}, {1, 3}, {2, 3}, {0, 0}, {0, 1}, {0, 2}, {0, 3}};
  for (auto [i, j] : fixed) {
    EXPECT_EQ(out.S(i, j), base.S(i, j)) << i << "," << j;
    EXPECT_EQ(out.T(i, j), base.T(i, j)) << i << "," << j;
  }
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const bool sensitive = i >= 4 || j >= 4;
      if (!sensitive) {
        EXPECT_EQ(out.S(i, j), base.S(i, j));
        EXPECT_EQ(out.T(i, j), base.T(i, j));
      } else {
        EXPECT_NE(out.S(i, j), base.S(i, j));
        EXPECT_NE(out.T(i, j), base.T(i, j));
      }
    }
  }
}

TEST(Privatize, SubsetScopePropertyOverRandomSets) {
  Rng rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    const int p = static_cast<int>(rng.UniformInt(1, 8));
    const SiteSummary base = SmallSummary(6, p, 100 + rep);
    std::vector<int> sens;
    for (int j = 1; j <= p; ++j) {
      if (rng.Bernoulli(0.4)) sens.push_back(j);
    }
    const PrivatizationScope scope = PrivatizationScope::Subset(sens);
    const SiteSummary out =
        Privatize(base, PrivacyBudget::Make(1.0, 0.01, 1.0), scope, rep);
    for (int i = 0; i <= p; ++i) {
      for (int j = 0; j <= p; ++j) {
        if (scope.Touches(i, j)) continue;
        ASSERT_EQ(out.S(i, j), base.S(i, j));
        ASSERT_EQ(out.T(i, j), base.T(i, j));
      }
    }
  }
}

TEST(Privatize, SeedDeterminism) {
  const SiteSummary base = SmallSummary(5, 3, 6);
  const PrivacyBudget b = PrivacyBudget::Make(1.0, 0.01, 6.0);
  const SiteSummary a = Privatize(base, b, PrivatizationScope::Full(), 11);
  const SiteSummary c = Privatize(base, b, PrivatizationScope::Full(), 11);
  const SiteSummary d = Privatize(base, b, PrivatizationScope::Full(), 12);
  EXPECT_EQ(a.S, c.S);
  EXPECT_EQ(a.T, c.T);
  EXPECT_NE(a.S, d.S);
}

TEST(Privatize, RejectsRepeatedReleaseAndBadIndices) {
  const SiteSummary base = SmallSummary(5, 3, 7);
  const PrivacyBudget b = PrivacyBudget::Make(1.0, 0.01, 6.0);
  const SiteSummary once = Privatize(base, b, PrivatizationScope::Full(), 1);
  EXPECT_THROW(Privatize(once, b, PrivatizationScope::Full(), 2),
               ValidationError);
  EXPECT_THROW(Privatize(base, b, PrivatizationScope::Subset({0}), 2),
               ValidationError);
  EXPECT_THROW(Privatize(base, b, PrivatizationScope::Subset({4}), 2),
               ValidationError);
  EXPECT_THROW(PrivatizeAll({once}, b, PrivatizationScope::Full(), 2,
                            Execution::kParallel),
               ValidationError);
}

TEST(PrivatizeAll, ParallelMatchesSerial) {
  std::vector<SiteSummary> sites;
  for (int k = 0; k < 50; ++k) {
    sites.push_back(SmallSummary(4 + k % 5, 3, 200 + k, "s" + std::to_string(k)));
  }
  const PrivacyBudget b = PrivacyBudget::Make(4.0, 0.01, 6.0);
  const auto serial =
      PrivatizeAll(sites, b, PrivatizationScope::Full(), 3, Execution::kSerial);
  const auto parallel = PrivatizeAll(sites, b, PrivatizationScope::Full(), 3,
                                     Execution::kParallel);
  for (size_t k = 0; k < sites.size(); ++k) {
    EXPECT_EQ(serial[k].S, parallel[k].S);
    EXPECT_EQ(serial[k].T, parallel[k].T);
  }
  // Streams are keyed by site id, so different sites get different noise
  // even when their summaries coincide.
  SiteSummary twin = sites[0];
  twin.site_id = "twin";
  const auto pair = PrivatizeAll({sites[0], twin}, b, PrivatizationScope::Full(),
                                 3, Execution::kSerial);
  EXPECT_NE(pair[0].S, pair[1].S);
}

}  // namespace
}  // namespace fedlmm
