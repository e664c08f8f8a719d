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

#include "fedlmm/summary.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fedlmm/errors.h"
#include "fedlmm/summary_kernels.h"

namespace fedlmm {
namespace {

// Rows needed before the blocked OpenMP kernel pays for itself.
constexpr int kParallelRowThreshold = 4 * kRowBlock;

// Relative tolerance for the PSD / rank-one checks on loaded summaries.
constexpr double kStructureTolerance = 1e-8;

bool AllFinite(const Eigen::MatrixXd& m) { return m.allFinite(); }

bool ExactlySymmetric(const Eigen::MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = j + 1; i < m.rows(); ++i) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

}  // namespace

void ValidateSiteData(const SiteData& data) {
  if (data.y.size() < 1) {
    throw ValidationError("site '" + data.site_id + "': no observations");
  }
  if (data.X.cols() < 1) {
    throw ValidationError("site '" + data.site_id + "': design has no columns");
  }
  if (data.X.rows() != data.y.size()) {
    std::ostringstream os;
    os << "site '" << data.site_id << "': y has " << data.y.size()
       << " rows but X has " << data.X.rows();
    throw ValidationError(os.str());
  }
  if (!data.y.allFinite()) {
    throw ValidationError("site '" + data.site_id + "': non-finite outcome");
  }
  if (!data.X.allFinite()) {
    throw ValidationError("site '" + data.site_id + "': non-finite covariate");
  }
}

void ValidateSummary(const SiteSummary& s) {
  const std::string who = "summary '" + s.site_id + "': ";
  if (s.n < 1) throw ValidationError(who + "n must be positive");
  if (s.S.rows() < 2 || s.S.rows() != s.S.cols()) {
    throw ValidationError(who + "S must be square with dimension p+1 >= 2");
  }
  if (s.T.rows() != s.S.rows() || s.T.cols() != s.S.cols()) {
    throw ValidationError(who + "S and T dimensions differ");
  }
  if (!AllFinite(s.S) || !AllFinite(s.T)) {
    throw ValidationError(who + "non-finite entry");
  }
  if (!ExactlySymmetric(s.S)) throw ValidationError(who + "S is not symmetric");
  if (!ExactlySymmetric(s.T)) throw ValidationError(who + "T is not symmetric");
  if (!s.covariates.empty() &&
      static_cast<int>(s.covariates.size()) != s.p()) {
    throw ValidationError(who + "covariate label count does not match p");
  }
  if (s.privatized) {
    if (!s.budget) throw ValidationError(who + "privatized without a budget");
    s.budget->Validate();
    return;
  }
  if (s.budget) throw ValidationError(who + "budget recorded but not privatized");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.S,
                                                     Eigen::EigenvaluesOnly);
  const double s_scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -kStructureTolerance * s_scale) {
    throw ValidationError(who + "S is not positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(s.T,
                                                     Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = et.eigenvalues();  // ascending
  const double t_scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -kStructureTolerance * t_scale ||
      (ev.size() >= 2 && ev(ev.size() - 2) > kStructureTolerance * t_scale)) {
    throw ValidationError(who + "T is not a rank-one outer product");
  }
}

SiteSummary ComputeSummary(const SiteData& data) {
  ValidateSiteData(data);
  const Execution execution = data.n() > kParallelRowThreshold
                                  ? Execution::kParallel
                                  : Execution::kSerial;
  CrossProducts cp = ComputeCrossProducts(data.y, data.X, execution);

  SiteSummary out;
  out.site_id = data.site_id;
  out.n = data.n();
  out.S = std::move(cp.gram);
  out.T = cp.sums * cp.sums.transpose();
  return out;
}

FederatedSummarySet::FederatedSummarySet(std::vector<SiteSummary> sites)
    : sites_(std::move(sites)) {
  if (sites_.empty()) throw ValidationError("no site summaries");
  p_ = sites_.front().p();
  std::set<std::string> ids;
  for (const SiteSummary& s : sites_) {
    ValidateSummary(s);
    if (s.p() != p_) {
      std::ostringstream os;
      os << "dimension mismatch: site '" << s.site_id << "' has p=" << s.p()
         << ", expected p=" << p_;
      throw ValidationError(os.str());
    }
    if (!ids.insert(s.site_id).second) {
      throw ValidationError("duplicate site id '" + s.site_id + "'");
    }
    total_n_ += s.n;
  }
}

bool FederatedSummarySet::any_privatized() const {
  return std::any_of(sites_.begin(), sites_.end(),
                     [](const SiteSummary& s) { return s.privatized; });
}

FederatedSummarySet MergeSummaries(std::vector<SiteSummary> summaries) {
  return FederatedSummarySet(std::move(summaries));
}

void ValidateModelSpec(const ModelSpec& spec, int p) {
  for (int j : spec.sensitive) {
    if (j < 1 || j > p) {
      std::ostringstream os;
      os << "sensitive index " << j << " outside 1.." << p;
      throw ValidationError(os.str());
    }
  }
  if (!spec.covariate_names.empty() &&
      static_cast<int>(spec.covariate_names.size()) != p) {
    throw ValidationError("covariate name count does not match p");
  }
  if (!spec.covariate_bounds.empty() &&
      static_cast<int>(spec.covariate_bounds.size()) != p) {
    throw ValidationError("covariate bound count does not match p");
  }
  auto check = [](const Interval& b, const std::string& what) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      throw ValidationError("invalid bound for " + what);
    }
  };
  for (size_t j = 0; j < spec.covariate_bounds.size(); ++j) {
    check(spec.covariate_bounds[j], "covariate " + std::to_string(j + 1));
  }
  if (spec.outcome_bound) check(*spec.outcome_bound, "outcome");
}

}  // namespace fedlmm
