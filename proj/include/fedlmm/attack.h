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

#ifndef FEDLMM_ATTACK_H_
#define FEDLMM_ATTACK_H_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fedlmm/privacy_budget.h"

namespace fedlmm {

// 0/1 design matrix, rows are individuals.
using BinaryMatrix = Eigen::MatrixXi;

// Reconstruction target: find a binary n x p matrix X with X'X = gram.
struct FeasibilityInstance {
  Eigen::MatrixXi gram;  // symmetric p x p, may hold out-of-range values
  int n = 0;
};

struct AttackConfig {
  int p_max = 12;
  double timeout_seconds = 10.0;
  // Clamp rounded entries into [0, n] (diagonal) and [0, min(G_jj, G_kk)]
  // (off-diagonal) before solving. Off by default: the attacker works with the
  // rounded release as is.
  bool clamp = false;
};

enum class AttackStatus { kUnique, kFeasibleMultiple, kInfeasibleRepaired, kFailed };

const char* AttackStatusName(AttackStatus s);

struct AttackResult {
  AttackStatus status = AttackStatus::kFailed;
  std::optional<BinaryMatrix> x_hat;
  // Sum over j <= k of |gram_jk - (X_hat' X_hat)_jk|.
  std::int64_t violation = 0;
  // Filled in by AttackPipeline; -1 when not computed.
  int hamming = -1;
  // 1 when X_hat solves the released instance exactly and matches the truth
  // after row sorting. A repaired (infeasible) guess never counts.
  int matrix_rate = 0;
  double element_rate = 0.0;
};

// Depth-first branch-and-bound over pattern counts: c_r >= 0 for each of the
// 2^p row patterns, sum c_r = n, sum_r c_r u_r u_r' = gram. Patterns are
// visited by descending popcount. Stops after the second solution to decide
// uniqueness. With no feasible count vector, searches for the count vector
// of minimum L1 violation. Throws ValidationError when p > p_max.
AttackResult Reconstruct(const FeasibilityInstance& instance,
                         const AttackConfig& config = {});

// Number of distinct feasible count vectors (row multisets), capped at
// `limit`. Returns -1 on timeout.
std::int64_t CountFeasible(const FeasibilityInstance& instance,
                           std::int64_t limit,
                           const AttackConfig& config = {});

// Rounds the upper triangle to the nearest integer and mirrors it; clamps
// when requested.
Eigen::MatrixXi RoundGram(const Eigen::MatrixXd& noisy, int n, bool clamp);

// Sorts rows of both matrices lexicographically and counts disagreeing
// entries. Throws ValidationError on a shape mismatch.
int HammingSorted(const BinaryMatrix& a, const BinaryMatrix& b);

// Full red-team pass: Gram of `true_x`, optional symmetrized Gaussian noise
// with the budget's sigma_dp, rounding, reconstruction and metrics.
AttackResult AttackPipeline(const BinaryMatrix& true_x,
                            const std::optional<PrivacyBudget>& budget,
                            std::uint64_t seed,
                            const AttackConfig& config = {});

}  // namespace fedlmm

#endif  // FEDLMM_ATTACK_H_
