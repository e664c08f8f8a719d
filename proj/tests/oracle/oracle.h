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

#ifndef FEDLMM_TESTS_ORACLE_H_
#define FEDLMM_TESTS_ORACLE_H_

// Independent reference implementations used by the tests. They work on raw
// per-site data with dense matrices and share no code with the library
// beyond the SiteData type and the Rng.

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fedlmm/rng.h"
#include "fedlmm/summary.h"

namespace fedlmm::oracle {

// Block-diagonal covariance with blocks sigma2 I + tau2 11', stacked data.
struct Stacked {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Sigma;
  std::vector<int> offsets;  // first row of each site
};

Stacked Stack(const std::vector<SiteData>& sites, double sigma2, double tau2);

// -1/2 [log|Sigma| + r' Sigma^-1 r], r = y - X beta, no 2 pi term.
double IpdLogLikMl(const std::vector<SiteData>& sites,
                   const Eigen::VectorXd& beta, double sigma2, double tau2);

// Dense GLS (X' Sigma^-1 X)^-1 X' Sigma^-1 y.
Eigen::VectorXd IpdGls(const std::vector<SiteData>& sites, double sigma2,
                       double tau2);

// Profile ML at the GLS beta, minus 1/2 log|X' Sigma^-1 X|.
double IpdLogLikReml(const std::vector<SiteData>& sites, double sigma2,
                     double tau2);

// CR0 sandwich with GLS residuals, assembled from dense per-site blocks.
Eigen::MatrixXd IpdSandwich(const std::vector<SiteData>& sites, double sigma2,
                            double tau2);

// Elementwise double loop over rows for S and T = s s'.
void BruteSummary(const SiteData& site, Eigen::MatrixXd* S, Eigen::MatrixXd* T);

// Random instance: K in [k_lo, k_hi], n_k in [n_lo, n_hi], p in [p_lo, p_hi]
// (column 0 an intercept), with site random effects and heteroskedastic
// errors. Retries until the pooled design has full column rank with margin.
std::vector<SiteData> RandomInstance(Rng& rng, int k_lo, int k_hi, int n_lo,
                                     int n_hi, int p_lo, int p_hi);

// Balanced one-way layout REML by the classical ANOVA moment equations,
// truncated at tau2 = 0 (then sigma2 = SST / (N - 1)).
struct OneWayReml {
  double sigma2;
  double tau2;
};
OneWayReml OneWayRemlClosedForm(const std::vector<Eigen::VectorXd>& groups);

// Row multisets of all n x p binary matrices keyed by the upper triangle of
// X'X. Each multiset is the sorted list of row codes (bit j = column j).
using GramKey = std::vector<int>;
using Fibers = std::map<GramKey, std::vector<std::vector<int>>>;
Fibers EnumerateFibers(int n, int p);
GramKey GramKeyOf(const Eigen::MatrixXi& gram);
Eigen::MatrixXi GramFromKey(const GramKey& key, int p);
std::vector<int> SortedRowCodes(const Eigen::MatrixXi& x);

// max ||X'X - X~'X~||_F over every binary n x p design X and every X~ that
// differs from X in exactly one row.
double BruteBinaryGramSensitivity(int n, int p);

}  // namespace fedlmm::oracle

#endif  // FEDLMM_TESTS_ORACLE_H_
