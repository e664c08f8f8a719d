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

#ifndef FEDLMM_SUMMARY_H_
#define FEDLMM_SUMMARY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/privacy_budget.h"

namespace fedlmm {

// Raw per-site data. Never leaves the site; used by the site itself, the
// simulation harness and the test oracles.
struct SiteData {
  std::string site_id;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // n x p, column 0 is the intercept when present.

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// Throws ValidationError on empty, mis-shaped or non-finite data.
void ValidateSiteData(const SiteData& data);

// The quadratic summaries released by one site. Index 0 of S and T is the
// outcome, indices 1..p are the covariates:
//   S = [y'y  y'X; X'y  X'X],   T = s s'  with  s = (1'y, 1'X).
struct SiteSummary {
  std::string site_id;
  std::int64_t n = 0;
  Eigen::MatrixXd S;
  Eigen::MatrixXd T;
  bool privatized = false;
  std::optional<PrivacyBudget> budget;
  // Optional covariate labels (length p) carried for reporting.
  std::vector<std::string> covariates;

  int p() const { return static_cast<int>(S.rows()) - 1; }
  int dim() const { return static_cast<int>(S.rows()); }
};

// Structural checks: shapes, finiteness, exact symmetry, n >= 1. For
// unprivatized summaries also checks S is PSD and T is rank one, to a
// relative tolerance.
void ValidateSummary(const SiteSummary& summary);

SiteSummary ComputeSummary(const SiteData& data);

// Ordered collection of site summaries. Keeps per-site identity because the
// likelihood needs each n_k individually.
class FederatedSummarySet {
 public:
  FederatedSummarySet() = default;
  explicit FederatedSummarySet(std::vector<SiteSummary> sites);

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  int p() const { return p_; }
  int dim() const { return p_ + 1; }
  std::int64_t total_n() const { return total_n_; }
  bool any_privatized() const;

  const SiteSummary& operator[](std::size_t k) const { return sites_[k]; }
  const std::vector<SiteSummary>& sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  std::vector<SiteSummary> Release() && { return std::move(sites_); }

 private:
  std::vector<SiteSummary> sites_;
  int p_ = 0;
  std::int64_t total_n_ = 0;
};

// Rejects dimension mismatches and duplicate site ids.
FederatedSummarySet MergeSummaries(std::vector<SiteSummary> summaries);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Analysis-model description. Sensitive indices use summary numbering:
// covariate j of X sits at index j + 1 of S, so the set lives in {1..p}.
struct ModelSpec {
  std::vector<std::string> covariate_names;
  bool intercept = true;
  std::vector<int> sensitive;
  std::vector<Interval> covariate_bounds;  // one per column of X
  std::optional<Interval> outcome_bound;
};

void ValidateModelSpec(const ModelSpec& spec, int p);

// Pooled standardization record for moving fits between scales. With an
// intercept every non-intercept column and y are centered and scaled; without
// one they are only scaled, which keeps the model space unchanged.
struct StandardizationRecord {
  bool intercept = true;
  double y_mean = 0.0;
  double y_sd = 1.0;
  Eigen::VectorXd x_mean;  // length p; intercept entry is 0
  Eigen::VectorXd x_sd;    // length p; intercept entry is 1

  // Linear map A and offset c with beta_original = A beta_std + c.
  Eigen::MatrixXd BetaJacobian() const;
  Eigen::VectorXd BetaOffset() const;

  Eigen::VectorXd BetaToOriginal(const Eigen::VectorXd& beta_std) const;
  Eigen::MatrixXd CovarianceToOriginal(const Eigen::MatrixXd& v_std) const;
  double VarianceToOriginal(double variance_std) const {
    return variance_std * y_sd * y_sd;
  }
};

struct StandardizedSites {
  std::vector<SiteData> sites;
  StandardizationRecord record;
};

// Throws ValidationError naming the column when a pooled SD is zero, and when
// `intercept` is set but column 0 is not identically one.
StandardizedSites Standardize(const std::vector<SiteData>& sites,
                              bool intercept);

}  // namespace fedlmm

#endif  // FEDLMM_SUMMARY_H_
