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

#include "fedlmm/estimator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fedlmm/errors.h"
#include "fedlmm/nelder_mead.h"

namespace fedlmm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Most negative softplus argument we evaluate; exp() underflows below this so
// tau2 is exactly zero there.
constexpr double kSoftplusFloor = -700.0;

double Softplus(double v) {
  if (v > 30.0) return v;
  return std::log1p(std::exp(v));
}

double SoftplusInverse(double t) {
  if (t > 30.0) return t;
  if (t <= 0.0) return kSoftplusFloor;
  return std::max(kSoftplusFloor, std::log(std::expm1(t)));
}

void CheckVarianceComponents(double sigma2, double tau2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("sigma2 must be positive and finite");
  }
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) {
    throw ValidationError("tau2 must be nonnegative and finite");
  }
}

struct SymmetricSolve {
  Eigen::VectorXd x;
  double condition = kInf;
  bool ok = false;
  bool positive_definite = false;
  double log_det = std::numeric_limits<double>::quiet_NaN();
};

// Solves W x = q for symmetric W. Cholesky when W is positive definite,
// otherwise the eigendecomposition (noisy summaries can make W indefinite).
SymmetricSolve SolveSymmetric(const Eigen::MatrixXd& w,
                              const Eigen::VectorXd& q,
                              double condition_limit) {
  SymmetricSolve out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  if (es.info() != Eigen::Success) return out;
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double max_abs = lambda.cwiseAbs().maxCoeff();
  const double min_abs = lambda.cwiseAbs().minCoeff();
  out.condition = min_abs > 0.0 ? max_abs / min_abs : kInf;
  if (!(out.condition <= condition_limit)) return out;
  out.positive_definite = lambda.minCoeff() > 0.0;
  if (out.positive_definite) {
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    if (llt.info() == Eigen::Success) {
      out.x = llt.solve(q);
      out.log_det = lambda.array().log().sum();
      out.ok = true;
      return out;
    }
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  out.x = v * (v.transpose() * q).cwiseQuotient(lambda);
  out.ok = true;
  return out;
}

// Pre-aggregated form of the summary set for fast profile evaluation. The
// shrinkage weight tau2 / (sigma2 + n tau2) depends on a site only through
// n_k, so T matrices are pooled by site size.
class ProfileEvaluator {
 public:
  struct Point {
    bool ok = false;
    double ml = -kInf;
    double reml = -kInf;
    double condition = kInf;
    Eigen::VectorXd beta;
    Eigen::MatrixXd w;
    Eigen::VectorXd q;
  };

  ProfileEvaluator(const FederatedSummarySet& summaries,
                   double condition_limit)
      : p_(summaries.p()), condition_limit_(condition_limit) {
    s_sum_ = Eigen::MatrixXd::Zero(p_ + 1, p_ + 1);
    std::map<std::int64_t, std::size_t> index;
    for (const SiteSummary& s : summaries) {
      s_sum_ += s.S;
      auto [it, inserted] = index.try_emplace(s.n, groups_.size());
      if (inserted) {
        groups_.push_back({s.n, 0, Eigen::MatrixXd::Zero(p_ + 1, p_ + 1)});
      }
      Group& g = groups_[it->second];
      g.count += 1;
      g.t_sum += s.T;
    }
    n_total_ = summaries.total_n();
  }

  int p() const { return p_; }
  std::int64_t n_total() const { return n_total_; }

  Point Evaluate(double sigma2, double tau2) const {
    Point pt;
    Eigen::MatrixXd a = s_sum_;
    double log_det_sigma = 0.0;
    for (const Group& g : groups_) {
      const double nk = static_cast<double>(g.n);
      const double denom = sigma2 + nk * tau2;
      if (tau2 != 0.0) a.noalias() -= (tau2 / denom) * g.t_sum;
      log_det_sigma +=
          g.count * ((nk - 1.0) * std::log(sigma2) + std::log(denom));
    }
    a /= sigma2;
    pt.w = a.bottomRightCorner(p_, p_);
    pt.q = a.bottomLeftCorner(p_, 1);
    SymmetricSolve solve = SolveSymmetric(pt.w, pt.q, condition_limit_);
    pt.condition = solve.condition;
    if (!solve.ok) return pt;
    pt.beta = std::move(solve.x);
    Eigen::VectorXd v(p_ + 1);
    v(0) = 1.0;
    v.tail(p_) = -pt.beta;
    const double quad = v.dot(a * v);
    pt.ml = -0.5 * (log_det_sigma + quad);
    pt.reml = solve.positive_definite ? pt.ml - 0.5 * solve.log_det : -kInf;
    pt.ok = std::isfinite(pt.ml);
    return pt;
  }

  // Residual quadratic form of the tau2 = 0 fit at sigma2 = 1, i.e. the
  // pooled residual sum of squares.
  double PooledRss() const {
    Point pt = Evaluate(1.0, 0.0);
    if (!pt.ok) return std::numeric_limits<double>::quiet_NaN();
    // ml = -1/2 (N log 1 + rss)
    return -2.0 * pt.ml;
  }

  double OutcomeVariance() const {
    return s_sum_(0, 0) / static_cast<double>(n_total_);
  }

 private:
  struct Group {
    std::int64_t n;
    int count;
    Eigen::MatrixXd t_sum;
  };

  int p_;
  double condition_limit_;
  std::int64_t n_total_ = 0;
  Eigen::MatrixXd s_sum_;
  std::vector<Group> groups_;
};

[[noreturn]] void ThrowSingular(double condition) {
  std::ostringstream os;
  os << "sum of site information matrices is singular or ill-conditioned "
        "(condition estimate "
     << condition << ")";
  throw SingularDesignError(os.str(), condition);
}

double PooledScale(const ProfileEvaluator& ev) {
  const double nd = static_cast<double>(ev.n_total());
  const double rss = ev.PooledRss();
  if (std::isfinite(rss) && rss > 0.0) return rss / nd;
  const double var = ev.OutcomeVariance();
  if (std::isfinite(var) && var > 0.0) return var;
  return 1.0;
}

// Starting points as (sigma2, tau2) multiples of the pooled scale.
constexpr std::array<std::array<double, 2>, 5> kStarts = {{
    {0.5, 0.5}, {0.9, 0.05}, {0.1, 2.0}, {0.3, 0.1}, {0.7, 5.0}}};

FitResult Fit(const FederatedSummarySet& summaries,
              const OptimizerConfig& config, Method method) {
  if (summaries.empty()) throw ValidationError("no site summaries");
  if (summaries.size() < 2 && !config.fixed_tau2) {
    throw ValidationError(
        "at least two sites are needed to estimate tau2; fix tau2 otherwise");
  }
  if (config.fixed_tau2 && !(*config.fixed_tau2 >= 0.0)) {
    throw ValidationError("fixed tau2 must be nonnegative");
  }
  if (config.restarts < 1) throw ValidationError("restarts must be >= 1");

  const ProfileEvaluator ev(summaries, config.condition_limit);
  const double scale = PooledScale(ev);
  const double sigma2_lo = config.sigma2_floor * scale;
  const double sigma2_hi = config.sigma2_ceiling * scale;
  const double tau2_hi = config.tau2_ceiling * scale;
  const double u_lo = std::log(sigma2_lo);
  const double u_hi = std::log(sigma2_hi);
  const double v_hi = SoftplusInverse(config.tau2_ceiling);

  auto value_of = [method](const ProfileEvaluator::Point& pt) {
    return method == Method::kMl ? pt.ml : pt.reml;
  };
  auto sigma2_of = [&](double u) { return std::exp(std::clamp(u, u_lo, u_hi)); };
  auto tau2_of = [&](double v) {
    return std::min(tau2_hi, scale * Softplus(std::clamp(v, kSoftplusFloor, v_hi)));
  };

  NelderMeadOptions nm;
  nm.f_tol = config.f_tol;
  nm.x_tol = config.x_tol;
  nm.max_evaluations = config.max_evaluations;

  double best_value = -kInf;
  double best_sigma2 = 0.0, best_tau2 = 0.0;
  bool best_converged = false;
  bool boundary = false;
  int evaluations = 0;
  const int restarts = std::min<int>(config.restarts, kStarts.size());

  if (config.fixed_tau2) {
    const double tau2 = *config.fixed_tau2;
    auto objective = [&](const Eigen::VectorXd& x) {
      const ProfileEvaluator::Point pt = ev.Evaluate(sigma2_of(x(0)), tau2);
      return pt.ok ? -value_of(pt) : kInf;
    };
    for (int r = 0; r < restarts; ++r) {
      Eigen::VectorXd start(1);
      start << std::log(kStarts[r][0] * scale);
      const NelderMeadResult res = NelderMeadMinimize(objective, start, nm);
      evaluations += res.evaluations;
      if (-res.value > best_value) {
        best_value = -res.value;
        best_sigma2 = sigma2_of(res.x(0));
        best_converged = res.converged;
      }
    }
    best_tau2 = tau2;
    boundary = tau2 == 0.0;
  } else {
    auto objective = [&](const Eigen::VectorXd& x) {
      const ProfileEvaluator::Point pt =
          ev.Evaluate(sigma2_of(x(0)), tau2_of(x(1)));
      return pt.ok ? -value_of(pt) : kInf;
    };
    for (int r = 0; r < restarts; ++r) {
      Eigen::VectorXd start(2);
      start << std::log(kStarts[r][0] * scale), SoftplusInverse(kStarts[r][1]);
      const NelderMeadResult res = NelderMeadMinimize(objective, start, nm);
      evaluations += res.evaluations;
      if (-res.value > best_value) {
        best_value = -res.value;
        best_sigma2 = sigma2_of(res.x(0));
        best_tau2 = tau2_of(res.x(1));
        best_converged = res.converged;
      }
    }

    // tau2 = 0 edge: sigma2 has a closed form there,
    // rss / N (ML) or rss / (N - p) (REML).
    const double rss = ev.PooledRss();
    if (std::isfinite(rss)) {
      const double dof = static_cast<double>(ev.n_total()) -
                         (method == Method::kReml ? ev.p() : 0);
      const double sigma2_edge =
          (rss > 0.0 && dof > 0.0) ? std::clamp(rss / dof, sigma2_lo, sigma2_hi)
                                   : sigma2_lo;
      const ProfileEvaluator::Point pt = ev.Evaluate(sigma2_edge, 0.0);
      ++evaluations;
      if (pt.ok && value_of(pt) >= best_value - config.f_tol) {
        best_value = value_of(pt);
        best_sigma2 = sigma2_edge;
        best_tau2 = 0.0;
        best_converged = true;
        boundary = true;
      }
    }
  }

  if (!std::isfinite(best_value)) {
    ThrowSingular(ev.Evaluate(scale, 0.0).condition);
  }

  const ProfileEvaluator::Point final_pt = ev.Evaluate(best_sigma2, best_tau2);
  if (!final_pt.ok || !std::isfinite(value_of(final_pt))) {
    ThrowSingular(final_pt.condition);
  }

  FitResult fit;
  fit.method = method;
  fit.theta_hat.beta = final_pt.beta;
  fit.theta_hat.sigma2 = best_sigma2;
  fit.theta_hat.tau2 = best_tau2;
  fit.objective = value_of(final_pt);
  fit.converged = best_converged;
  fit.iterations = evaluations;
  fit.boundary_tau = boundary;
  fit.condition = final_pt.condition;
  fit.per_site = ComputeSiteWeights(summaries, best_sigma2, best_tau2);
  return fit;
}

}  // namespace

const char* MethodName(Method m) { return m == Method::kMl ? "ML" : "REML"; }

double LogLikMl(const Theta& theta, const FederatedSummarySet& summaries) {
  CheckVarianceComponents(theta.sigma2, theta.tau2);
  const int p = summaries.p();
  if (theta.beta.size() != p) {
    throw ValidationError("beta length does not match p");
  }
  Eigen::VectorXd v(p + 1);
  v(0) = 1.0;
  v.tail(p) = -theta.beta;
  const double s2 = theta.sigma2;
  const double t2 = theta.tau2;
  double total = 0.0;
  for (const SiteSummary& s : summaries) {
    const double nk = static_cast<double>(s.n);
    const double denom = s2 + nk * t2;
    const double quad =
        (v.dot(s.S * v) - (t2 / denom) * v.dot(s.T * v)) / s2;
    total += (nk - 1.0) * std::log(s2) + std::log(denom) + quad;
  }
  return -0.5 * total;
}

BetaProfile ProfileBeta(double sigma2, double tau2,
                        const FederatedSummarySet& summaries,
                        double condition_limit) {
  CheckVarianceComponents(sigma2, tau2);
  const int p = summaries.p();
  BetaProfile out;
  out.W_sum = Eigen::MatrixXd::Zero(p, p);
  out.Q_sum = Eigen::VectorXd::Zero(p);
  for (const SiteWeights& sw : ComputeSiteWeights(summaries, sigma2, tau2)) {
    out.W_sum += sw.W;
    out.Q_sum += sw.Q;
  }
  SymmetricSolve solve = SolveSymmetric(out.W_sum, out.Q_sum, condition_limit);
  out.condition = solve.condition;
  if (!solve.ok) ThrowSingular(solve.condition);
  out.beta = std::move(solve.x);
  return out;
}

double ProfileLogLikMl(double sigma2, double tau2,
                       const FederatedSummarySet& summaries) {
  CheckVarianceComponents(sigma2, tau2);
  const ProfileEvaluator ev(summaries, 1e12);
  const ProfileEvaluator::Point pt = ev.Evaluate(sigma2, tau2);
  if (!pt.ok) ThrowSingular(pt.condition);
  return pt.ml;
}

double ProfileLogLikReml(double sigma2, double tau2,
                         const FederatedSummarySet& summaries) {
  CheckVarianceComponents(sigma2, tau2);
  const ProfileEvaluator ev(summaries, 1e12);
  const ProfileEvaluator::Point pt = ev.Evaluate(sigma2, tau2);
  if (!pt.ok) ThrowSingular(pt.condition);
  if (!std::isfinite(pt.reml)) {
    throw NumericalError(
        "REML determinant argument is not positive definite");
  }
  return pt.reml;
}

std::vector<SiteWeights> ComputeSiteWeights(
    const FederatedSummarySet& summaries, double sigma2, double tau2) {
  CheckVarianceComponents(sigma2, tau2);
  const int p = summaries.p();
  std::vector<SiteWeights> out;
  out.reserve(summaries.size());
  for (const SiteSummary& s : summaries) {
    const double nk = static_cast<double>(s.n);
    const double shrink = tau2 / (sigma2 * (sigma2 + nk * tau2));
    SiteWeights sw;
    sw.W = s.S.bottomRightCorner(p, p) / sigma2 -
           shrink * s.T.bottomRightCorner(p, p);
    sw.Q = s.S.bottomLeftCorner(p, 1) / sigma2 -
           shrink * s.T.bottomLeftCorner(p, 1);
    out.push_back(std::move(sw));
  }
  return out;
}

FitResult FitMl(const FederatedSummarySet& summaries,
                const OptimizerConfig& config) {
  return Fit(summaries, config, Method::kMl);
}

FitResult FitReml(const FederatedSummarySet& summaries,
                  const OptimizerConfig& config) {
  if (summaries.any_privatized()) {
    throw ValidationError(
        "REML refused on privatized summaries: the log-determinant term "
        "suffers determinant amplification of the injected noise and is "
        "numerically unstable; use ML");
  }
  return Fit(summaries, config, Method::kReml);
}

}  // namespace fedlmm
