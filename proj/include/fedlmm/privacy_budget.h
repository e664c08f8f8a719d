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

#ifndef FEDLMM_PRIVACY_BUDGET_H_
#define FEDLMM_PRIVACY_BUDGET_H_

namespace fedlmm {

// (epsilon, delta) budget for one Gaussian-mechanism release together with
// the Frobenius sensitivity it was calibrated against. sigma_dp is always
// derived, never set independently.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_f = 0.0;
  double sigma_dp = 0.0;

  // sigma_dp = delta_f * sqrt(2 ln(1.25 / delta)) / epsilon.
  static PrivacyBudget Make(double epsilon, double delta, double delta_f);

  // Throws ValidationError unless the fields are in range and sigma_dp agrees
  // with the recomputed value to 1e-12 relative.
  void Validate() const;
};

double GaussianSigma(double epsilon, double delta, double delta_f);

}  // namespace fedlmm

#endif  // FEDLMM_PRIVACY_BUDGET_H_
