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

#ifndef FEDLMM_PRIVACY_H_
#define FEDLMM_PRIVACY_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/privacy_budget.h"
#include "fedlmm/rng.h"
#include "fedlmm/summary.h"
#include "fedlmm/summary_kernels.h"

namespace fedlmm {

enum class CalibrationMode { kFixedEpsilon, kDimensionAdjusted };

// kFixedEpsilon: use `epsilon` with the supplied `delta_f`.
// kDimensionAdjusted: epsilon(p) = 2 p epsilon0 against the binary-Gram
// sensitivity 2p, so sigma_dp = sqrt(2 ln(1.25/delta)) / epsilon0 for every p.
struct CalibrationRule {
  CalibrationMode mode = CalibrationMode::kDimensionAdjusted;
  double epsilon0 = 1.0;
  double epsilon = 0.0;
  double delta_f = 0.0;
};

// Frobenius sensitivity of X'X for binary covariates under replace-one
// adjacency: ||x x' - x' x'||_F <= ||x||^2 + ||x'||^2 <= 2p.
double SensitivityBinaryGram(int p);

// Conservative joint Frobenius sensitivity of (S_k, T_k) for bounded records
// z = (y, x) in the box given by `spec`. With r = max ||z|| over the box and
// D = the box diagonal (max ||z - z'||):
//   S block:  ||z z' - z' z'^T||_F <= 2 r^2
//   T block:  T = s s',  ||s s' - s~ s~'||_F <= ||s - s~|| (||s|| + ||s~||)
//             <= D * 2 n_k r
// combined in quadrature. With `include_t` false only the S block counts.
// When every lower bound is 0, D = r and the T term is 2 n_k r^2.
double SensitivityBounded(const ModelSpec& spec, std::int64_t n_k,
                          bool include_t = true);

PrivacyBudget Calibrate(const CalibrationRule& rule, double delta, int p);

// Which summary entries receive noise. kSubset perturbs every (i, j) whose
// row or column index is in `sensitive` (summary numbering, 1..p).
struct PrivatizationScope {
  enum class Kind { kFull, kSubset };
  Kind kind = Kind::kFull;
  std::vector<int> sensitive;

  static PrivatizationScope Full() { return {}; }
  static PrivatizationScope Subset(std::vector<int> idx) {
    return {Kind::kSubset, std::move(idx)};
  }
  bool Touches(int i, int j) const;
};

// Adds symmetrized Gaussian noise to `m` in place: an i.i.d. N(0, sigma^2)
// matrix U is drawn row-major and (U + U')/2 is added, restricted to entries
// accepted by `scope`. Diagonal noise keeps variance sigma^2, off-diagonal
// noise has variance sigma^2 / 2. The result is bitwise symmetric when `m`
// is.
void AddSymmetricGaussianNoise(Eigen::MatrixXd& m, double sigma, Rng& rng,
                               const PrivatizationScope& scope);

// Gaussian mechanism on the pair (S, T) as one joint release. The noise
// stream is derived from (seed, site_id), so privatizing sites in any order
// or in parallel gives identical output. Throws ValidationError if the
// summary is already privatized.
SiteSummary Privatize(const SiteSummary& summary, const PrivacyBudget& budget,
                      const PrivatizationScope& scope, std::uint64_t seed);

// Privatizes every site (OpenMP over sites for kParallel).
std::vector<SiteSummary> PrivatizeAll(const std::vector<SiteSummary>& sites,
                                      const PrivacyBudget& budget,
                                      const PrivatizationScope& scope,
                                      std::uint64_t seed,
                                      Execution execution);

}  // namespace fedlmm

#endif  // FEDLMM_PRIVACY_H_
