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

#include "fedlmm/privacy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fedlmm/errors.h"

namespace fedlmm {

double GaussianSigma(double epsilon, double delta, double delta_f) {
  return delta_f * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

PrivacyBudget PrivacyBudget::Make(double epsilon, double delta,
                                  double delta_f) {
  PrivacyBudget b;
  b.epsilon = epsilon;
  b.delta = delta;
  b.delta_f = delta_f;
  b.sigma_dp = GaussianSigma(epsilon, delta, delta_f);
  b.Validate();
  return b;
}

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw ValidationError("sensitivity delta_f must be positive and finite");
  }
  const double expected = GaussianSigma(epsilon, delta, delta_f);
  if (!(std::abs(sigma_dp - expected) <= 1e-12 * expected)) {
    std::ostringstream os;
    os.precision(17);
    os << "budget sigma_dp " << sigma_dp
       << " does not match the calibrated value " << expected;
    throw ValidationError(os.str());
  }
}

double SensitivityBinaryGram(int p) {
  if (p < 1) throw ValidationError("p must be >= 1");
  return 2.0 * p;
}

double SensitivityBounded(const ModelSpec& spec, std::int64_t n_k,
                          bool include_t) {
  if (n_k < 1) throw ValidationError("n_k must be >= 1");
  if (spec.covariate_bounds.empty() || !spec.outcome_bound) {
    throw ValidationError(
        "bounded sensitivity needs outcome and covariate bounds");
  }
  ValidateModelSpec(spec, static_cast<int>(spec.covariate_bounds.size()));
  std::vector<Interval> box;
  box.push_back(*spec.outcome_bound);
  box.insert(box.end(), spec.covariate_bounds.begin(),
             spec.covariate_bounds.end());
  double r2 = 0.0;
  double d2 = 0.0;
  for (const Interval& b : box) {
    r2 += std::max(b.lo * b.lo, b.hi * b.hi);
    d2 += (b.hi - b.lo) * (b.hi - b.lo);
  }
  const double s_block = 2.0 * r2;
  if (!include_t) return s_block;
  const double t_block =
      2.0 * static_cast<double>(n_k) * std::sqrt(r2) * std::sqrt(d2);
  return std::hypot(s_block, t_block);
}

PrivacyBudget Calibrate(const CalibrationRule& rule, double delta, int p) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  switch (rule.mode) {
    case CalibrationMode::kDimensionAdjusted: {
      if (!(rule.epsilon0 > 0.0)) {
        throw ValidationError("epsilon0 must be positive");
      }
      return PrivacyBudget::Make(2.0 * p * rule.epsilon0, delta,
                                 SensitivityBinaryGram(p));
    }
    case CalibrationMode::kFixedEpsilon:
      return PrivacyBudget::Make(rule.epsilon, delta, rule.delta_f);
  }
  throw ValidationError("unknown calibration mode");
}

bool PrivatizationScope::Touches(int i, int j) const {
  if (kind == Kind::kFull) return true;
  return std::find(sensitive.begin(), sensitive.end(), i) != sensitive.end() ||
         std::find(sensitive.begin(), sensitive.end(), j) != sensitive.end();
}

void AddSymmetricGaussianNoise(Eigen::MatrixXd& m, double sigma, Rng& rng,
                               const PrivatizationScope& scope) {
  const int d = static_cast<int>(m.rows());
  Eigen::MatrixXd u(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) u(i, j) = sigma * rng.Normal();
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (!scope.Touches(i, j)) continue;
      const double noise = 0.5 * (u(i, j) + u(j, i));
      m(i, j) += noise;
      if (j != i) m(j, i) = m(i, j);
    }
  }
}

SiteSummary Privatize(const SiteSummary& summary, const PrivacyBudget& budget,
                      const PrivatizationScope& scope, std::uint64_t seed) {
  if (summary.privatized) {
    throw ValidationError("summary '" + summary.site_id +
                          "' is already privatized; repeated releases are "
                          "not supported");
  }
  budget.Validate();
  for (int j : scope.sensitive) {
    if (j < 1 || j > summary.p()) {
      throw ValidationError("sensitive index " + std::to_string(j) +
                            " outside 1.." + std::to_string(summary.p()));
    }
  }
  SiteSummary out = summary;
  Rng rng(MixSeed(seed, summary.site_id));
  AddSymmetricGaussianNoise(out.S, budget.sigma_dp, rng, scope);
  AddSymmetricGaussianNoise(out.T, budget.sigma_dp, rng, scope);
  out.privatized = true;
  out.budget = budget;
  return out;
}

std::vector<SiteSummary> PrivatizeAll(const std::vector<SiteSummary>& sites,
                                      const PrivacyBudget& budget,
                                      const PrivatizationScope& scope,
                                      std::uint64_t seed,
                                      Execution execution) {
  std::vector<SiteSummary> out(sites.size());
  const int count = static_cast<int>(sites.size());
  if (execution == Execution::kSerial) {
    for (int k = 0; k < count; ++k) {
      out[k] = Privatize(sites[k], budget, scope, seed);
    }
    return out;
  }
  // Exceptions may not cross the OpenMP region; validate up front instead.
  budget.Validate();
  for (const SiteSummary& s : sites) {
    if (s.privatized) {
      throw ValidationError("summary '" + s.site_id +
                            "' is already privatized");
    }
    for (int j : scope.sensitive) {
      if (j < 1 || j > s.p()) {
        throw ValidationError("sensitive index " + std::to_string(j) +
                              " outside 1.." + std::to_string(s.p()));
      }
    }
  }
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    out[k] = Privatize(sites[k], budget, scope, seed);
  }
  return out;
}

}  // namespace fedlmm
