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

#include "fedlmm/variance.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "fedlmm/errors.h"

namespace fedlmm {

const char* CorrectionName(Correction c) {
  switch (c) {
    case Correction::kCr0:
      return "CR0";
    case Correction::kCr1:
      return "CR1";
    case Correction::kCr1p:
      return "CR1p";
    case Correction::kCr1s:
      return "CR1S";
  }
  return "?";
}

Correction ParseCorrection(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "cr0") return Correction::kCr0;
  if (lower == "cr1") return Correction::kCr1;
  if (lower == "cr1p") return Correction::kCr1p;
  if (lower == "cr1s") return Correction::kCr1s;
  throw ValidationError("unknown correction '" + name +
                        "' (expected cr0, cr1, cr1p or cr1s)");
}

RobustVariance Cr0(const FederatedSummarySet& summaries, const FitResult& fit,
                   double condition_limit) {
  const int p = summaries.p();
  if (fit.per_site.size() != summaries.size()) {
    throw ValidationError("fit does not carry per-site weights for every site");
  }
  if (fit.theta_hat.beta.size() != p) {
    throw ValidationError("fit beta length does not match summaries");
  }
  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (const SiteWeights& sw : fit.per_site) {
    bread += sw.W;
    const Eigen::VectorXd score = sw.Q - sw.W * fit.theta_hat.beta;
    meat.noalias() += score * score.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bread);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double min_abs = lambda.cwiseAbs().minCoeff();
  const double condition =
      min_abs > 0.0 ? lambda.cwiseAbs().maxCoeff() / min_abs
                    : std::numeric_limits<double>::infinity();
  if (es.info() != Eigen::Success || !(condition <= condition_limit)) {
    std::ostringstream os;
    os << "sandwich bread is singular (condition estimate " << condition
       << ")";
    throw SingularDesignError(os.str(), condition);
  }
  const Eigen::MatrixXd& u = es.eigenvectors();
  const Eigen::MatrixXd bread_inv =
      u * lambda.cwiseInverse().asDiagonal() * u.transpose();

  RobustVariance out;
  out.V = bread_inv * meat * bread_inv;
  // Exact symmetry; the diagonal stays >= 0 since meat is a sum of outer
  // products.
  out.V = 0.5 * (out.V + out.V.transpose()).eval();
  out.correction = Correction::kCr0;
  out.K = static_cast<int>(summaries.size());
  out.N = summaries.total_n();
  out.se = out.V.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

double CorrectionFactor(Correction c, int K, std::int64_t N, int p) {
  const double k = K;
  const double n = static_cast<double>(N);
  switch (c) {
    case Correction::kCr0:
      return 1.0;
    case Correction::kCr1:
      if (K <= 1) throw ValidationError("CR1 needs K > 1");
      return k / (k - 1.0);
    case Correction::kCr1p:
      if (K <= p) throw ValidationError("CR1p needs K > p");
      return k / (k - p);
    case Correction::kCr1s:
      if (K <= 1) throw ValidationError("CR1S needs K > 1");
      if (N <= p) throw ValidationError("CR1S needs N > p");
      return k * (n - 1.0) / ((k - 1.0) * (n - p));
  }
  return 1.0;
}

RobustVariance ApplyCorrection(const RobustVariance& v, Correction target) {
  const int p = static_cast<int>(v.V.rows());
  const double factor = CorrectionFactor(target, v.K, v.N, p) /
                        CorrectionFactor(v.correction, v.K, v.N, p);
  RobustVariance out = v;
  out.V = v.V * factor;
  out.correction = target;
  out.se = out.V.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

std::vector<WaldInterval> WaldCi(const FitResult& fit, const RobustVariance& v,
                                 double level, CriticalValue critical) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must lie in (0, 1)");
  }
  const Eigen::VectorXd& beta = fit.theta_hat.beta;
  if (beta.size() != v.se.size()) {
    throw ValidationError("variance and fit dimensions differ");
  }
  const double prob = 0.5 * (1.0 + level);
  double q;
  if (critical == CriticalValue::kStudentT) {
    if (v.K < 2) throw ValidationError("t critical value needs K >= 2");
    q = boost::math::quantile(boost::math::students_t(v.K - 1.0), prob);
  } else {
    q = boost::math::quantile(boost::math::normal(), prob);
  }
  std::vector<WaldInterval> out(beta.size());
  for (int j = 0; j < beta.size(); ++j) {
    out[j].estimate = beta(j);
    out[j].se = v.se(j);
    out[j].lo = beta(j) - q * v.se(j);
    out[j].hi = beta(j) + q * v.se(j);
  }
  return out;
}

}  // namespace fedlmm
