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

#ifndef FEDLMM_SIMHARNESS_H_
#define FEDLMM_SIMHARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/attack.h"
#include "fedlmm/estimator.h"
#include "fedlmm/rng.h"
#include "fedlmm/summary.h"
#include "fedlmm/summary_kernels.h"
#include "fedlmm/variance.h"

namespace fedlmm {

enum class Generator { kRandomIntercept, kRandomInterceptSlope };
enum class Analysis { kFull, kUnderfit };

// Multi-site data-generating process. Six covariates per record:
//   x1 ~ B(0.5), x2 ~ N(0, 1), x3 ~ B(0.3), x4 ~ B(0.7), x5 ~ B(0.5),
//   x6 ~ N(0, 0.5^2),
//   y = b0 + sum_m b_m x_m + u_0k [+ u_1k x1] + e,
// with u ~ N(0, tau2) (independent intercept and slope) and e ~ N(0, sigma2).
// Site sizes follow a two-component uniform mixture. The analysis design
// keeps the intercept and either all six covariates or only x1, x2.
struct Scenario {
  std::string id;
  Generator generator = Generator::kRandomIntercept;
  Analysis analysis = Analysis::kFull;
  int K = 200;
  double small_site_probability = 0.8;
  int small_lo = 2;
  int small_hi = 10;
  int large_lo = 50;
  int large_hi = 100;
  Eigen::VectorXd beta0;  // length 7, intercept first
  double sigma2 = 1.0;
  double tau2 = 1.0;

  // "ri-correct", "ri-mis", "ris-correct" or "ris-mis".
  static Scenario Named(const std::string& id, int K);
  static std::vector<std::string> Names();

  // beta0 for the full analysis. For the underfit analysis the omitted
  // covariates are independent of x1, x2, so their means fold into the
  // intercept: (b0 + sum_{m>2} b_m E[x_m], b1, b2).
  Eigen::VectorXd TargetBeta() const;
  // Summary indices of x4, x5, x6 when they are in the analysis design.
  std::vector<int> SensitiveIndices() const;
  std::vector<std::string> CovariateNames() const;
};

int DrawSiteSize(const Scenario& scenario, Rng& rng);

// Sites "site-001", ... with analysis-design X (intercept column first).
std::vector<SiteData> Generate(const Scenario& scenario, std::uint64_t seed);

enum class Arm { kIpd, kDp, kDp2 };
const char* ArmName(Arm arm);

enum class FitStatus { kOk, kNotConverged, kFailed };
const char* FitStatusName(FitStatus s);

struct MetricRow {
  std::string scenario;
  Arm arm = Arm::kIpd;
  double epsilon0 = 0.0;  // 0 for the IPD arm
  int K = 0;
  int replicate = 0;
  std::int64_t N = 0;
  Correction correction = Correction::kCr0;
  FitStatus status = FitStatus::kOk;
  std::string message;  // failure reason, empty when ok
  // Original-scale estimates and standard errors.
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  double sigma2 = 0.0;
  double tau2 = 0.0;
  double condition = 0.0;  // of sum_k W_k at the optimum (standardized scale)
  double l2_error = 0.0;         // ||beta - target||
  double l2_privacy_cost = 0.0;  // ||beta - beta_IPD||, 0 for IPD
  double se_inflation = 1.0;     // ||se|| / ||se_IPD||
};

struct StudyOptions {
  Correction correction = Correction::kCr0;
  bool dp = true;
  bool dp2 = true;
  Execution execution = Execution::kParallel;
  OptimizerConfig optimizer;
};

// Replicated IPD / DP / DP2 comparison. Replicate r draws its data from
// MixSeed(seed, r), so rows do not depend on the execution mode. Within a
// replicate all arms share the same data. Fit failures become rows with a
// non-ok status; they never abort the study.
std::vector<MetricRow> RunEstimationStudy(const Scenario& scenario,
                                          const std::vector<double>& epsilon0,
                                          int reps, std::uint64_t seed,
                                          const StudyOptions& options = {});

// One replicate of the study (all arms).
std::vector<MetricRow> RunEstimationReplicate(
    const Scenario& scenario, const std::vector<double>& epsilon0,
    int replicate, std::uint64_t seed, const StudyOptions& options);

struct CalibrationRow {
  std::string scenario;
  Arm arm = Arm::kIpd;
  double epsilon0 = 0.0;
  int K = 0;
  Correction correction = Correction::kCr0;
  int coefficient = 0;
  int used = 0;      // ok rows
  int excluded = 0;  // rows with a non-ok status
  double mean_se = 0.0;
  double sd_beta = 0.0;
  double ratio = 0.0;
  bool degenerate = false;  // fewer than 2 ok rows or SD = 0
};

// Mean estimated SE over the empirical SD of beta, per group and coefficient.
// Groups are (scenario, arm, epsilon0, K, correction) in sorted order.
std::vector<CalibrationRow> SeCalibration(const std::vector<MetricRow>& rows);

struct SlopeEstimate {
  double slope = 0.0;
  double se = 0.0;
  int levels = 0;
};

// OLS slope of y on x with its standard error. Needs >= 3 distinct x.
SlopeEstimate LogLogSlope(const std::vector<double>& x,
                          const std::vector<double>& y);

// Heavy noise can make the profile likelihood unbounded along the set where
// the noisy sum_k W_k turns singular; the optimizer then stops next to that
// set with a huge condition number and an arbitrarily large beta. Regular
// fits sit many orders of magnitude below this threshold.
inline constexpr double kNearSingularCondition = 1e8;

// Slope of log(mean cost^2) on log(1/K) over the rows of one arm and one
// epsilon0. Mean costs use ok rows with condition <= max_condition. Rejects
// fewer than 3 K levels and zero costs.
SlopeEstimate PrivacyCostSlopeVsK(
    const std::vector<MetricRow>& rows, Arm arm, double epsilon0,
    double max_condition = kNearSingularCondition);
// Slope of log(mean cost^2) on log(epsilon0) at one K.
SlopeEstimate PrivacyCostSlopeVsEpsilon(
    const std::vector<MetricRow>& rows, Arm arm, int K,
    double max_condition = kNearSingularCondition);

double Median(std::vector<double> v);

struct ReconstructionCell {
  int n = 0;
  int p = 0;
  std::optional<double> epsilon0;  // empty: no noise
  double delta = 0.01;
  int reps = 0;
  double matrix_rate = 0.0;
  double element_rate = 0.0;  // mean over replicates with an estimate
  int unique = 0;
  int multiple = 0;
  int repaired = 0;
  int failed = 0;
};

// Binary designs with i.i.d. B(0.5) entries, dimension-adjusted calibration.
// Replicate r uses MixSeed(seed, r) for both the design and the noise, so
// cells that differ only in epsilon0 see the same designs.
ReconstructionCell RunReconstructionCell(
    int n, int p, std::optional<double> epsilon0, double delta, int reps,
    std::uint64_t seed, const AttackConfig& config = {},
    Execution execution = Execution::kParallel);

BinaryMatrix RandomBinaryMatrix(int n, int p, double prob, Rng& rng);

// CSV writers (header + one line per row, shortest round-trip numbers).
std::string MetricRowsCsv(const std::vector<MetricRow>& rows);
std::string CalibrationCsv(const std::vector<CalibrationRow>& rows);
std::string ReconstructionCsv(const std::vector<ReconstructionCell>& cells);

}  // namespace fedlmm

#endif  // FEDLMM_SIMHARNESS_H_
