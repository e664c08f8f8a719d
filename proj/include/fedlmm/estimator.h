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

#ifndef FEDLMM_ESTIMATOR_H_
#define FEDLMM_ESTIMATOR_H_

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/summary.h"

namespace fedlmm {

// Random-intercept model parameters: Sigma_k = sigma2 I + tau2 11'.
struct Theta {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  double tau2 = 0.0;
};

enum class Method { kMl, kReml };

const char* MethodName(Method m);

struct OptimizerConfig {
  // Box for (sigma2, tau2), relative to the pooled outcome variance scale:
  // sigma2 in [sigma2_floor, sigma2_ceiling] * scale, tau2 in
  // [0, tau2_ceiling * scale].
  double sigma2_floor = 1e-8;
  double sigma2_ceiling = 1e8;
  double tau2_ceiling = 1e8;
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  int max_evaluations = 2000;  // per restart
  int restarts = 3;
  double condition_limit = 1e12;
  // Fit with tau2 held at this value (required when K = 1).
  std::optional<double> fixed_tau2;
};

// Per-site pieces of the GLS score at the fitted (sigma2, tau2):
//   W_k = X_k' Sigma_k^-1 X_k,  Q_k = X_k' Sigma_k^-1 y_k.
struct SiteWeights {
  Eigen::MatrixXd W;
  Eigen::VectorXd Q;
};

struct FitResult {
  Theta theta_hat;
  double objective = 0.0;  // maximized log-likelihood (ML or REML)
  Method method = Method::kMl;
  bool converged = false;
  int iterations = 0;  // objective evaluations across all restarts
  bool boundary_tau = false;
  double condition = 0.0;  // condition number of sum_k W_k at the optimum
  std::vector<SiteWeights> per_site;
};

// Summary-form ML log-likelihood (additive constant -N/2 log 2pi omitted):
//   -1/2 sum_k [ log{sigma2^(n_k-1) (sigma2 + n_k tau2)}
//               + (1,-b)' {S_k - tau2/(sigma2 + n_k tau2) T_k} (1,-b) / sigma2 ]
// Throws ValidationError when sigma2 <= 0, tau2 < 0 or beta has the wrong
// length.
double LogLikMl(const Theta& theta, const FederatedSummarySet& summaries);

struct BetaProfile {
  Eigen::VectorXd beta;
  Eigen::MatrixXd W_sum;
  Eigen::VectorXd Q_sum;
  double condition = 0.0;
};

// Closed-form maximizer of the likelihood in beta for fixed (sigma2, tau2).
// Throws SingularDesignError when cond(sum W_k) exceeds `condition_limit`.
BetaProfile ProfileBeta(double sigma2, double tau2,
                        const FederatedSummarySet& summaries,
                        double condition_limit = 1e12);

// Profile objectives g(sigma2, tau2) = loglik at beta_hat(sigma2, tau2); the
// REML version subtracts 1/2 log|sum_k W_k|.
double ProfileLogLikMl(double sigma2, double tau2,
                       const FederatedSummarySet& summaries);
double ProfileLogLikReml(double sigma2, double tau2,
                         const FederatedSummarySet& summaries);

std::vector<SiteWeights> ComputeSiteWeights(
    const FederatedSummarySet& summaries, double sigma2, double tau2);

// Maximizes the profile ML objective over the box with Nelder-Mead on
// (log sigma2, softplus^-1(tau2 / scale)) from `restarts` starting points,
// plus an explicit check of the tau2 = 0 edge. A run that exhausts its
// evaluation budget yields converged = false rather than an error.
FitResult FitMl(const FederatedSummarySet& summaries,
                const OptimizerConfig& config = {});

// REML counterpart. Refuses privatized input.
FitResult FitReml(const FederatedSummarySet& summaries,
                  const OptimizerConfig& config = {});

}  // namespace fedlmm

#endif  // FEDLMM_ESTIMATOR_H_
