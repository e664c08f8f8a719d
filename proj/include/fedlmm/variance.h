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

#ifndef FEDLMM_VARIANCE_H_
#define FEDLMM_VARIANCE_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/estimator.h"
#include "fedlmm/summary.h"

namespace fedlmm {

// Scalar small-sample corrections of the cluster-robust sandwich. CR2/CR3
// need per-observation leverages and cannot be formed from summaries.
enum class Correction { kCr0, kCr1, kCr1p, kCr1s };

const char* CorrectionName(Correction c);
Correction ParseCorrection(const std::string& name);  // "cr0", "CR1p", ...

struct RobustVariance {
  Eigen::MatrixXd V;  // beta block only
  Correction correction = Correction::kCr0;
  int K = 0;
  std::int64_t N = 0;
  Eigen::VectorXd se;
};

// CR0 sandwich from summaries:
//   V = (sum W_k)^-1 (sum P_k) (sum W_k)^-1,
//   P_k = (Q_k - W_k b)(Q_k - W_k b)'.
// Uses the W_k, Q_k cached in `fit`. On privatized input this is the noisy
// sandwich built from the perturbed summaries.
RobustVariance Cr0(const FederatedSummarySet& summaries, const FitResult& fit,
                   double condition_limit = 1e12);

// Multiplier relative to CR0: 1, K/(K-1), K/(K-p), K(N-1)/((K-1)(N-p)).
double CorrectionFactor(Correction c, int K, std::int64_t N, int p);

// Rescales v (whatever its current correction) to `target`.
RobustVariance ApplyCorrection(const RobustVariance& v, Correction target);

enum class CriticalValue { kNormal, kStudentT };

struct WaldInterval {
  double estimate = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// beta_j +/- q * se_j with q the (1 + level)/2 quantile of N(0,1), or of
// t_{K-1} when requested.
std::vector<WaldInterval> WaldCi(const FitResult& fit, const RobustVariance& v,
                                 double level,
                                 CriticalValue critical = CriticalValue::kNormal);

}  // namespace fedlmm

#endif  // FEDLMM_VARIANCE_H_
