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

#include <gtest/gtest.h>

#include "fedlmm/errors.h"
#include "fedlmm/estimator.h"
#include "fedlmm/simharness.h"
#include "fedlmm/summary.h"
#include "fedlmm/variance.h"
#include "oracle.h"

namespace fedlmm {
namespace {

FederatedSummarySet Summarize(const std::vector<SiteData>& sites) {
  std::vector<SiteSummary> sums;
  for (const SiteData& s : sites) sums.push_back(ComputeSummary(s));
  return MergeSummaries(std::move(sums));
}

// A FitResult at fixed variance components with the profiled beta.
FitResult FitAt(const FederatedSummarySet& set, double sigma2, double tau2) {
  FitResult fit;
  fit.theta_hat.sigma2 = sigma2;
  fit.theta_hat.tau2 = tau2;
  fit.theta_hat.beta = ProfileBeta(sigma2, tau2, set).beta;
  fit.per_site = ComputeSiteWeights(set, sigma2, tau2);
  fit.converged = true;
  return fit;
}

TEST(Cr0, MatchesDenseSandwichOn200Instances) {
  Rng rng(41);
  for (int inst = 0; inst < 200; ++inst) {
    const auto sites = oracle::RandomInstance(rng, 2, 10, 1, 8, 1, 4);
    const FederatedSummarySet set = Summarize(sites);
    const double s2 = 0.2 + 3.0 * rng.Uniform();
    const double t2 = inst % 4 == 0 ? 0.0 : 2.0 * rng.Uniform();
    const RobustVariance v = Cr0(set, FitAt(set, s2, t2));
    const Eigen::MatrixXd ref = oracle::IpdSandwich(sites, s2, t2);
    const double scale = ref.cwiseAbs().maxCoeff();
    EXPECT_LE((v.V - ref).cwiseAbs().maxCoeff(), 1e-9 * scale)
        << "instance " << inst;
    EXPECT_LE((v.V - v.V.transpose()).cwiseAbs().maxCoeff(),
              1e-12 * v.V.cwiseAbs().maxCoeff());
    EXPECT_GE(v.V.diagonal().minCoeff(), 0.0);
    EXPECT_EQ(v.K, static_cast<int>(sites.size()));
  }
}

TEST(Cr0, SingleClusterScoreVanishes) {
  Rng rng(42);
  const auto sites = oracle::RandomInstance(rng, 1, 1, 8, 8, 3, 3);
  const FederatedSummarySet set = Summarize(sites);
  const RobustVariance v = Cr0(set, FitAt(set, 1.3, 0.4));
  const double bread_scale =
      ProfileBeta(1.3, 0.4, set).W_sum.inverse().cwiseAbs().maxCoeff();
  EXPECT_LE(v.V.cwiseAbs().maxCoeff(), 1e-12 * bread_scale);
}

TEST(Cr0, CloseToModelBasedUnderCorrectSpecification) {
  Scenario sc = Scenario::Named("ri-correct", 500);
  sc.small_site_probability = 1.0;
  sc.small_lo = sc.small_hi = 6;
  const StandardizedSites st = Standardize(Generate(sc, 43), true);
  const FederatedSummarySet set = Summarize(st.sites);
  const FitResult fit = FitMl(set);
  const RobustVariance v = Cr0(set, fit);
  const Eigen::MatrixXd model =
      ProfileBeta(fit.theta_hat.sigma2, fit.theta_hat.tau2, set)
          .W_sum.inverse();
  for (int j = 0; j < v.V.rows(); ++j) {
    EXPECT_NEAR(std::sqrt(v.V(j, j) / model(j, j)), 1.0, 0.10) << j;
  }
}

TEST(Cr0, RejectsMismatchedFit) {
  Rng rng(44);
  const auto sites = oracle::RandomInstance(rng, 3, 3, 4, 6, 2, 2);
  const FederatedSummarySet set = Summarize(sites);
  FitResult fit = FitAt(set, 1.0, 0.5);
  fit.per_site.pop_back();
  EXPECT_THROW(Cr0(set, fit), ValidationError);
}

TEST(CorrectionFactor, ConstantsAndLimits) {
  EXPECT_EQ(CorrectionFactor(Correction::kCr0, 20, 100, 7), 1.0);
  EXPECT_DOUBLE_EQ(CorrectionFactor(Correction::kCr1, 20, 100, 7), 20.0 / 19.0);
  EXPECT_DOUBLE_EQ(CorrectionFactor(Correction::kCr1p, 20, 100, 7), 20.0 / 13.0);
  EXPECT_DOUBLE_EQ(CorrectionFactor(Correction::kCr1s, 20, 100, 7),
                   (20.0 * 99.0) / (19.0 * 93.0));
  for (Correction c : {Correction::kCr1, Correction::kCr1p, Correction::kCr1s}) {
    EXPECT_LE(CorrectionFactor(c, 10000, 1000000, 7) - 1.0, 1e-2);
  }
  EXPECT_THROW(CorrectionFactor(Correction::kCr1p, 7, 100, 7), ValidationError);
  EXPECT_THROW(CorrectionFactor(Correction::kCr1s, 20, 7, 7), ValidationError);
  EXPECT_THROW(CorrectionFactor(Correction::kCr1, 1, 7, 1), ValidationError);
}

TEST(CorrectionFactor, ParseNames) {
  EXPECT_EQ(ParseCorrection("cr0"), Correction::kCr0);
  EXPECT_EQ(ParseCorrection("CR1p"), Correction::kCr1p);
  EXPECT_EQ(ParseCorrection("cr1s"), Correction::kCr1s);
  EXPECT_THROW(ParseCorrection("hc3"), ValidationError);
}

TEST(ApplyCorrection, MonotoneOnTheDiagonal) {
  Rng rng(45);
  for (int inst = 0; inst < 50; ++inst) {
    const auto sites = oracle::RandomInstance(rng, 5, 10, 2, 8, 1, 4);
    const FederatedSummarySet set = Summarize(sites);
    const RobustVariance v0 = Cr0(set, FitAt(set, 1.0, 0.5));
    const RobustVariance v1 = ApplyCorrection(v0, Correction::kCr1);
    const RobustVariance v1p = ApplyCorrection(v0, Correction::kCr1p);
    for (int j = 0; j < v0.V.rows(); ++j) {
      EXPECT_GE(v1.V(j, j), v0.V(j, j));
      EXPECT_GE(v1p.V(j, j), v1.V(j, j));
    }
    EXPECT_EQ(v1p.correction, Correction::kCr1p);
    EXPECT_DOUBLE_EQ(v1p.se(0), std::sqrt(v1p.V(0, 0)));
    // Switching back to CR0 undoes the scaling.
    const RobustVariance back = ApplyCorrection(v1p, Correction::kCr0);
    EXPECT_LE((back.V - v0.V).cwiseAbs().maxCoeff(),
              1e-14 * v0.V.cwiseAbs().maxCoeff());
  }
}

TEST(WaldCi, NormalQuantileAndDegenerateInterval) {
  FitResult fit;
  fit.theta_hat.beta = Eigen::Vector2d(0.0, 3.0);
  RobustVariance v;
  v.V = Eigen::Matrix2d::Zero();
  v.V(0, 0) = 1.0;
  v.se = Eigen::Vector2d(1.0, 0.0);
  v.K = 30;
  const auto ci = WaldCi(fit, v, 0.95);
  EXPECT_NEAR(ci[0].lo, -1.95996, 1e-4);
  EXPECT_NEAR(ci[0].hi, 1.95996, 1e-4);
  EXPECT_EQ(ci[1].lo, 3.0);
  EXPECT_EQ(ci[1].hi, 3.0);
  const auto narrow = WaldCi(fit, v, 0.90);
  EXPECT_NEAR(narrow[0].hi, 1.644854, 1e-5);
  const auto t = WaldCi(fit, v, 0.95, CriticalValue::kStudentT);
  EXPECT_NEAR(t[0].hi, 2.045230, 1e-5);  // t_{0.975, 29}
  EXPECT_THROW(WaldCi(fit, v, 1.0), ValidationError);
  EXPECT_THROW(WaldCi(fit, v, 0.0), ValidationError);
}

}  // namespace
}  // namespace fedlmm
