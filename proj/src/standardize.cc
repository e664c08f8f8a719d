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

#include <cmath>
#include <sstream>

#include "fedlmm/errors.h"
#include "fedlmm/summary.h"

namespace fedlmm {

Eigen::MatrixXd StandardizationRecord::BetaJacobian() const {
  const int p = static_cast<int>(x_sd.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  const int first = intercept ? 1 : 0;
  for (int j = first; j < p; ++j) a(j, j) = y_sd / x_sd(j);
  if (intercept) {
    a(0, 0) = y_sd;
    for (int j = 1; j < p; ++j) a(0, j) = -y_sd * x_mean(j) / x_sd(j);
  }
  return a;
}

Eigen::VectorXd StandardizationRecord::BetaOffset() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(x_sd.size());
  if (intercept) c(0) = y_mean;
  return c;
}

Eigen::VectorXd StandardizationRecord::BetaToOriginal(
    const Eigen::VectorXd& beta_std) const {
  return BetaJacobian() * beta_std + BetaOffset();
}

Eigen::MatrixXd StandardizationRecord::CovarianceToOriginal(
    const Eigen::MatrixXd& v_std) const {
  const Eigen::MatrixXd a = BetaJacobian();
  Eigen::MatrixXd v = a * v_std * a.transpose();
  return 0.5 * (v + v.transpose());
}

StandardizedSites Standardize(const std::vector<SiteData>& sites,
                              bool intercept) {
  if (sites.empty()) throw ValidationError("no sites to standardize");
  const int p = sites.front().p();
  std::int64_t n_total = 0;
  for (const SiteData& s : sites) {
    ValidateSiteData(s);
    if (s.p() != p) throw ValidationError("sites disagree on p");
    if (intercept && !(s.X.col(0).array() == 1.0).all()) {
      throw ValidationError("site '" + s.site_id +
                            "': column 0 is not an intercept");
    }
    n_total += s.n();
  }
  if (n_total < 2) throw ValidationError("need at least two observations");

  // Two-pass pooled moments: means first, then centered sums of squares.
  Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(p);
  double sum_y = 0.0;
  for (const SiteData& s : sites) {
    sum_x += s.X.colwise().sum().transpose();
    sum_y += s.y.sum();
  }
  const double nd = static_cast<double>(n_total);
  Eigen::VectorXd mean_x = sum_x / nd;
  const double mean_y = sum_y / nd;
  Eigen::VectorXd ss_x = Eigen::VectorXd::Zero(p);
  double ss_y = 0.0;
  for (const SiteData& s : sites) {
    ss_x += (s.X.rowwise() - mean_x.transpose())
                .colwise()
                .squaredNorm()
                .transpose();
    ss_y += (s.y.array() - mean_y).square().sum();
  }

  StandardizationRecord rec;
  rec.intercept = intercept;
  rec.x_mean = Eigen::VectorXd::Zero(p);
  rec.x_sd = Eigen::VectorXd::Ones(p);
  const int first = intercept ? 1 : 0;
  for (int j = first; j < p; ++j) {
    const double sd = std::sqrt(ss_x(j) / (nd - 1.0));
    if (!(sd > 0.0)) {
      std::ostringstream os;
      os << "zero-variance covariate column " << j;
      throw ValidationError(os.str());
    }
    rec.x_sd(j) = sd;
    if (intercept) rec.x_mean(j) = mean_x(j);
  }
  rec.y_sd = std::sqrt(ss_y / (nd - 1.0));
  if (!(rec.y_sd > 0.0)) throw ValidationError("zero-variance outcome");
  rec.y_mean = intercept ? mean_y : 0.0;

  StandardizedSites out;
  out.record = rec;
  out.sites.reserve(sites.size());
  for (const SiteData& s : sites) {
    SiteData t;
    t.site_id = s.site_id;
    t.y = (s.y.array() - rec.y_mean) / rec.y_sd;
    t.X = s.X;
    for (int j = first; j < p; ++j) {
      t.X.col(j) = (s.X.col(j).array() - rec.x_mean(j)) / rec.x_sd(j);
    }
    out.sites.push_back(std::move(t));
  }
  return out;
}

}  // namespace fedlmm
