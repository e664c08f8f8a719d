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

#include "fedlmm/simharness.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "fedlmm/csv.h"
#include "fedlmm/errors.h"
#include "fedlmm/privacy.h"

namespace fedlmm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Covariate laws: Bernoulli probability, or a negative value for a normal
// with the given standard deviation in `kSd`.
constexpr double kBernoulliP[6] = {0.5, -1.0, 0.3, 0.7, 0.5, -1.0};
constexpr double kSd[6] = {0.0, 1.0, 0.0, 0.0, 0.0, 0.5};
constexpr double kMean[6] = {0.5, 0.0, 0.3, 0.7, 0.5, 0.0};

struct ArmFit {
  FitStatus status = FitStatus::kFailed;
  std::string message;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  double sigma2 = kNaN;
  double tau2 = kNaN;
  double condition = kNaN;
};

ArmFit FitArm(const std::vector<SiteSummary>& summaries,
              const StandardizationRecord& record, const StudyOptions& options) {
  ArmFit out;
  try {
    const FederatedSummarySet set(summaries);
    const FitResult fit = FitMl(set, options.optimizer);
    RobustVariance v = Cr0(set, fit, options.optimizer.condition_limit);
    v = ApplyCorrection(v, options.correction);
    out.beta = record.BetaToOriginal(fit.theta_hat.beta);
    const Eigen::MatrixXd v_orig = record.CovarianceToOriginal(v.V);
    out.se = v_orig.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.sigma2 = record.VarianceToOriginal(fit.theta_hat.sigma2);
    out.tau2 = record.VarianceToOriginal(fit.theta_hat.tau2);
    out.condition = fit.condition;
    out.status = fit.converged ? FitStatus::kOk : FitStatus::kNotConverged;
    if (!fit.converged) out.message = "optimizer did not converge";
  } catch (const NumericalError& e) {
    out.status = FitStatus::kFailed;
    out.message = e.what();
  } catch (const ValidationError& e) {
    out.status = FitStatus::kFailed;
    out.message = e.what();
  }
  return out;
}

MetricRow MakeRow(const Scenario& scenario, Arm arm, double epsilon0,
                  int replicate, std::int64_t N, const StudyOptions& options,
                  const ArmFit& fit, const Eigen::VectorXd& target,
                  const ArmFit* ipd) {
  MetricRow row;
  row.scenario = scenario.id;
  row.arm = arm;
  row.epsilon0 = epsilon0;
  row.K = scenario.K;
  row.replicate = replicate;
  row.N = N;
  row.correction = options.correction;
  row.status = fit.status;
  row.message = fit.message;
  row.sigma2 = fit.sigma2;
  row.tau2 = fit.tau2;
  row.condition = fit.condition;
  const int p = static_cast<int>(target.size());
  if (fit.status == FitStatus::kFailed) {
    row.beta = Eigen::VectorXd::Constant(p, kNaN);
    row.se = Eigen::VectorXd::Constant(p, kNaN);
    row.l2_error = row.l2_privacy_cost = row.se_inflation = kNaN;
    return row;
  }
  row.beta = fit.beta;
  row.se = fit.se;
  row.l2_error = (fit.beta - target).norm();
  if (ipd == nullptr) {
    row.l2_privacy_cost = 0.0;
    row.se_inflation = 1.0;
  } else if (ipd->status == FitStatus::kFailed) {
    row.l2_privacy_cost = row.se_inflation = kNaN;
  } else {
    row.l2_privacy_cost = (fit.beta - ipd->beta).norm();
    row.se_inflation = fit.se.norm() / ipd->se.norm();
  }
  return row;
}

std::vector<MetricRow> FailedReplicate(const Scenario& scenario,
                                       const std::vector<double>& epsilon0,
                                       int replicate,
                                       const StudyOptions& options,
                                       const std::string& message) {
  std::vector<MetricRow> rows;
  ArmFit failed;
  failed.message = message;
  const Eigen::VectorXd target = scenario.TargetBeta();
  rows.push_back(MakeRow(scenario, Arm::kIpd, 0.0, replicate, 0, options,
                         failed, target, nullptr));
  for (double eps : epsilon0) {
    if (options.dp) {
      rows.push_back(MakeRow(scenario, Arm::kDp, eps, replicate, 0, options,
                             failed, target, &failed));
    }
    if (options.dp2) {
      rows.push_back(MakeRow(scenario, Arm::kDp2, eps, replicate, 0, options,
                             failed, target, &failed));
    }
  }
  return rows;
}

double MeanSquaredCost(const std::vector<MetricRow>& rows, Arm arm,
                       double epsilon0, int K, double max_condition) {
  double sum = 0.0;
  int count = 0;
  for (const MetricRow& r : rows) {
    if (r.arm != arm || r.status != FitStatus::kOk) continue;
    if (r.epsilon0 != epsilon0 || r.K != K) continue;
    if (!(r.condition <= max_condition)) continue;
    if (!std::isfinite(r.l2_privacy_cost)) continue;
    sum += r.l2_privacy_cost * r.l2_privacy_cost;
    ++count;
  }
  return count > 0 ? sum / count : kNaN;
}

void CheckCostLevels(const std::vector<double>& costs) {
  for (double c : costs) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ValidationError(
          "privacy-cost slope needs a positive finite mean cost at every "
          "level (a zero-noise arm has none)");
    }
  }
}

}  // namespace

Scenario Scenario::Named(const std::string& id, int K) {
  if (K < 1) throw ValidationError("K must be >= 1");
  Scenario s;
  s.id = id;
  s.K = K;
  s.beta0.resize(7);
  s.beta0 << 1.0, 0.5, 0.5, -1.0, -0.5, 1.0, -1.0;
  if (id == "ri-correct") {
    s.generator = Generator::kRandomIntercept;
    s.analysis = Analysis::kFull;
  } else if (id == "ri-mis") {
    s.generator = Generator::kRandomIntercept;
    s.analysis = Analysis::kUnderfit;
  } else if (id == "ris-correct") {
    s.generator = Generator::kRandomInterceptSlope;
    s.analysis = Analysis::kFull;
  } else if (id == "ris-mis") {
    s.generator = Generator::kRandomInterceptSlope;
    s.analysis = Analysis::kUnderfit;
  } else {
    throw ValidationError("unknown scenario '" + id +
                          "' (expected ri-correct, ri-mis, ris-correct or "
                          "ris-mis)");
  }
  return s;
}

std::vector<std::string> Scenario::Names() {
  return {"ri-correct", "ri-mis", "ris-correct", "ris-mis"};
}

Eigen::VectorXd Scenario::TargetBeta() const {
  if (analysis == Analysis::kFull) return beta0;
  Eigen::VectorXd t(3);
  double intercept = beta0(0);
  for (int m = 3; m <= 6; ++m) intercept += beta0(m) * kMean[m - 1];
  t << intercept, beta0(1), beta0(2);
  return t;
}

std::vector<int> Scenario::SensitiveIndices() const {
  // Summary index = design column + 1; x4..x6 are design columns 4..6.
  if (analysis == Analysis::kFull) return {5, 6, 7};
  return {};
}

std::vector<std::string> Scenario::CovariateNames() const {
  if (analysis == Analysis::kFull) {
    return {"(Intercept)", "x1", "x2", "x3", "x4", "x5", "x6"};
  }
  return {"(Intercept)", "x1", "x2"};
}

int DrawSiteSize(const Scenario& scenario, Rng& rng) {
  if (rng.Bernoulli(scenario.small_site_probability)) {
    return static_cast<int>(rng.UniformInt(scenario.small_lo, scenario.small_hi));
  }
  return static_cast<int>(rng.UniformInt(scenario.large_lo, scenario.large_hi));
}

std::vector<SiteData> Generate(const Scenario& scenario, std::uint64_t seed) {
  if (scenario.beta0.size() != 7) {
    throw ValidationError("scenario beta0 must have length 7");
  }
  const int cols = scenario.analysis == Analysis::kFull ? 7 : 3;
  const double tau = std::sqrt(scenario.tau2);
  const double sigma = std::sqrt(scenario.sigma2);
  std::vector<SiteData> sites(scenario.K);
  for (int k = 0; k < scenario.K; ++k) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(k)));
    const int n = DrawSiteSize(scenario, rng);
    const double u0 = tau * rng.Normal();
    const double u1 = scenario.generator == Generator::kRandomInterceptSlope
                          ? tau * rng.Normal()
                          : 0.0;
    SiteData& site = sites[k];
    std::ostringstream id;
    id << "site-";
    id.width(3);
    id.fill('0');
    id << k + 1;
    site.site_id = id.str();
    site.y.resize(n);
    site.X.resize(n, cols);
    double x[6];
    for (int i = 0; i < n; ++i) {
      for (int m = 0; m < 6; ++m) {
        x[m] = kBernoulliP[m] >= 0.0 ? (rng.Bernoulli(kBernoulliP[m]) ? 1.0 : 0.0)
                                     : kSd[m] * rng.Normal();
      }
      double mean = scenario.beta0(0) + u0 + u1 * x[0];
      for (int m = 0; m < 6; ++m) mean += scenario.beta0(m + 1) * x[m];
      site.y(i) = mean + sigma * rng.Normal();
      site.X(i, 0) = 1.0;
      for (int c = 1; c < cols; ++c) site.X(i, c) = x[c - 1];
    }
  }
  return sites;
}

const char* ArmName(Arm arm) {
  switch (arm) {
    case Arm::kIpd:
      return "IPD";
    case Arm::kDp:
      return "DP";
    case Arm::kDp2:
      return "DP2";
  }
  return "?";
}

const char* FitStatusName(FitStatus s) {
  switch (s) {
    case FitStatus::kOk:
      return "ok";
    case FitStatus::kNotConverged:
      return "not-converged";
    case FitStatus::kFailed:
      return "failed";
  }
  return "?";
}

std::vector<MetricRow> RunEstimationReplicate(
    const Scenario& scenario, const std::vector<double>& epsilon0,
    int replicate, std::uint64_t seed, const StudyOptions& options) {
  const std::uint64_t rep_seed =
      MixSeed(seed, static_cast<std::uint64_t>(replicate));
  const std::vector<SiteData> raw =
      Generate(scenario, MixSeed(rep_seed, "data"));
  StandardizedSites std_sites;
  try {
    std_sites = Standardize(raw, true);
  } catch (const ValidationError& e) {
    // Tiny K can leave a binary column constant across all sites.
    return FailedReplicate(scenario, epsilon0, replicate, options, e.what());
  }
  std::vector<SiteSummary> summaries;
  summaries.reserve(std_sites.sites.size());
  std::int64_t N = 0;
  for (const SiteData& site : std_sites.sites) {
    summaries.push_back(ComputeSummary(site));
    N += site.n();
  }
  const Eigen::VectorXd target = scenario.TargetBeta();

  std::vector<MetricRow> rows;
  const ArmFit ipd = FitArm(summaries, std_sites.record, options);
  rows.push_back(MakeRow(scenario, Arm::kIpd, 0.0, replicate, N, options, ipd,
                         target, nullptr));

  const int p = summaries.front().p();
  const double delta = 1.0 / static_cast<double>(N);
  for (double eps : epsilon0) {
    CalibrationRule rule;
    rule.mode = CalibrationMode::kDimensionAdjusted;
    rule.epsilon0 = eps;
    const PrivacyBudget budget = Calibrate(rule, delta, p);
    struct ArmSpec {
      Arm arm;
      bool enabled;
      PrivatizationScope scope;
    };
    const ArmSpec arms[] = {
        {Arm::kDp, options.dp, PrivatizationScope::Full()},
        {Arm::kDp2, options.dp2,
         PrivatizationScope::Subset(scenario.SensitiveIndices())}};
    for (const ArmSpec& a : arms) {
      if (!a.enabled) continue;
      const std::uint64_t noise_seed = MixSeed(
          rep_seed, std::string(ArmName(a.arm)) + "/" + FormatDouble(eps));
      std::vector<SiteSummary> noisy =
          PrivatizeAll(summaries, budget, a.scope, noise_seed, Execution::kSerial);
      const ArmFit fit = FitArm(noisy, std_sites.record, options);
      rows.push_back(MakeRow(scenario, a.arm, eps, replicate, N, options, fit,
                             target, &ipd));
    }
  }
  return rows;
}

std::vector<MetricRow> RunEstimationStudy(const Scenario& scenario,
                                          const std::vector<double>& epsilon0,
                                          int reps, std::uint64_t seed,
                                          const StudyOptions& options) {
  if (reps < 1) throw ValidationError("reps must be >= 1");
  for (double eps : epsilon0) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw ValidationError("epsilon0 values must be positive and finite");
    }
  }
  std::vector<std::vector<MetricRow>> per_rep(reps);
  if (options.execution == Execution::kSerial) {
    for (int r = 0; r < reps; ++r) {
      per_rep[r] = RunEstimationReplicate(scenario, epsilon0, r, seed, options);
    }
  } else {
    std::vector<std::exception_ptr> errors(reps);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
      try {
        per_rep[r] =
            RunEstimationReplicate(scenario, epsilon0, r, seed, options);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<MetricRow> rows;
  for (auto& v : per_rep) {
    for (auto& row : v) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CalibrationRow> SeCalibration(const std::vector<MetricRow>& rows) {
  using Key = std::tuple<std::string, int, double, int, int>;
  std::map<Key, std::vector<const MetricRow*>> groups;
  for (const MetricRow& r : rows) {
    groups[Key{r.scenario, static_cast<int>(r.arm), r.epsilon0, r.K,
               static_cast<int>(r.correction)}]
        .push_back(&r);
  }
  std::vector<CalibrationRow> out;
  for (const auto& [key, members] : groups) {
    const int p = static_cast<int>(members.front()->beta.size());
    std::vector<const MetricRow*> ok;
    for (const MetricRow* r : members) {
      if (r->status == FitStatus::kOk) ok.push_back(r);
    }
    for (int j = 0; j < p; ++j) {
      CalibrationRow c;
      c.scenario = std::get<0>(key);
      c.arm = static_cast<Arm>(std::get<1>(key));
      c.epsilon0 = std::get<2>(key);
      c.K = std::get<3>(key);
      c.correction = static_cast<Correction>(std::get<4>(key));
      c.coefficient = j;
      c.used = static_cast<int>(ok.size());
      c.excluded = static_cast<int>(members.size() - ok.size());
      if (ok.size() < 2) {
        c.mean_se = c.sd_beta = c.ratio = kNaN;
        c.degenerate = true;
        out.push_back(c);
        continue;
      }
      double mean_beta = 0.0, mean_se = 0.0;
      for (const MetricRow* r : ok) {
        mean_beta += r->beta(j);
        mean_se += r->se(j);
      }
      mean_beta /= ok.size();
      mean_se /= ok.size();
      double ss = 0.0;
      for (const MetricRow* r : ok) {
        ss += (r->beta(j) - mean_beta) * (r->beta(j) - mean_beta);
      }
      c.mean_se = mean_se;
      c.sd_beta = std::sqrt(ss / (ok.size() - 1.0));
      c.degenerate = !(c.sd_beta > 0.0);
      c.ratio = c.degenerate ? kNaN : c.mean_se / c.sd_beta;
      out.push_back(c);
    }
  }
  return out;
}

SlopeEstimate LogLogSlope(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("x and y lengths differ");
  std::vector<double> distinct(x);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw ValidationError("slope needs at least 3 distinct levels");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeEstimate out;
  out.slope = sxy / sxx;
  double rss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - out.slope * (x[i] - mx);
    rss += e * e;
  }
  out.se = std::sqrt(rss / (n - 2.0) / sxx);
  out.levels = static_cast<int>(distinct.size());
  return out;
}

SlopeEstimate PrivacyCostSlopeVsK(const std::vector<MetricRow>& rows, Arm arm,
                                  double epsilon0, double max_condition) {
  if (arm == Arm::kIpd) {
    throw ValidationError("the IPD arm has no privacy cost");
  }
  std::vector<int> ks;
  for (const MetricRow& r : rows) {
    if (r.arm == arm && r.epsilon0 == epsilon0) ks.push_back(r.K);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.size() < 3) {
    throw ValidationError("privacy-cost slope needs at least 3 K levels");
  }
  std::vector<double> x, y, costs;
  for (int K : ks) {
    const double c = MeanSquaredCost(rows, arm, epsilon0, K, max_condition);
    costs.push_back(c);
    x.push_back(std::log(1.0 / K));
  }
  CheckCostLevels(costs);
  for (double c : costs) y.push_back(std::log(c));
  return LogLogSlope(x, y);
}

SlopeEstimate PrivacyCostSlopeVsEpsilon(const std::vector<MetricRow>& rows,
                                        Arm arm, int K, double max_condition) {
  if (arm == Arm::kIpd) {
    throw ValidationError("the IPD arm has no privacy cost");
  }
  std::vector<double> eps;
  for (const MetricRow& r : rows) {
    if (r.arm == arm && r.K == K) eps.push_back(r.epsilon0);
  }
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 3) {
    throw ValidationError("privacy-cost slope needs at least 3 epsilon0 levels");
  }
  std::vector<double> x, y, costs;
  for (double e : eps) {
    costs.push_back(MeanSquaredCost(rows, arm, e, K, max_condition));
    x.push_back(std::log(e));
  }
  CheckCostLevels(costs);
  for (double c : costs) y.push_back(std::log(c));
  return LogLogSlope(x, y);
}

double Median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](double d) { return !std::isfinite(d); }),
          v.end());
  if (v.empty()) return kNaN;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

BinaryMatrix RandomBinaryMatrix(int n, int p, double prob, Rng& rng) {
  BinaryMatrix x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.Bernoulli(prob) ? 1 : 0;
  }
  return x;
}

ReconstructionCell RunReconstructionCell(int n, int p,
                                         std::optional<double> epsilon0,
                                         double delta, int reps,
                                         std::uint64_t seed,
                                         const AttackConfig& config,
                                         Execution execution) {
  if (n < 1 || p < 1) throw ValidationError("n and p must be >= 1");
  if (reps < 1) throw ValidationError("reps must be >= 1");
  if (p > config.p_max) {
    throw ValidationError("p exceeds the pattern-enumeration capacity");
  }
  std::optional<PrivacyBudget> budget;
  if (epsilon0) {
    CalibrationRule rule;
    rule.mode = CalibrationMode::kDimensionAdjusted;
    rule.epsilon0 = *epsilon0;
    budget = Calibrate(rule, delta, p);
  }
  std::vector<AttackResult> results(reps);
  auto run = [&](int r) {
    const std::uint64_t rep_seed = MixSeed(seed, static_cast<std::uint64_t>(r));
    Rng design_rng(MixSeed(rep_seed, "design"));
    const BinaryMatrix x = RandomBinaryMatrix(n, p, 0.5, design_rng);
    results[r] = AttackPipeline(x, budget, rep_seed, config);
  };
  if (execution == Execution::kSerial) {
    for (int r = 0; r < reps; ++r) run(r);
  } else {
    // Inputs are validated above; AttackPipeline cannot throw past here.
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) run(r);
  }
  ReconstructionCell cell;
  cell.n = n;
  cell.p = p;
  cell.epsilon0 = epsilon0;
  cell.delta = delta;
  cell.reps = reps;
  double element_sum = 0.0;
  int element_count = 0;
  int matrix_sum = 0;
  for (const AttackResult& res : results) {
    matrix_sum += res.matrix_rate;
    if (std::isfinite(res.element_rate)) {
      element_sum += res.element_rate;
      ++element_count;
    }
    switch (res.status) {
      case AttackStatus::kUnique:
        ++cell.unique;
        break;
      case AttackStatus::kFeasibleMultiple:
        ++cell.multiple;
        break;
      case AttackStatus::kInfeasibleRepaired:
        ++cell.repaired;
        break;
      case AttackStatus::kFailed:
        ++cell.failed;
        break;
    }
  }
  cell.matrix_rate = static_cast<double>(matrix_sum) / reps;
  cell.element_rate = element_count > 0 ? element_sum / element_count : kNaN;
  return cell;
}

std::string MetricRowsCsv(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  int p = 0;
  for (const MetricRow& r : rows) p = std::max(p, static_cast<int>(r.beta.size()));
  os << "scenario,arm,epsilon0,K,replicate,N,correction,status,l2_error,"
        "l2_privacy_cost,se_inflation,sigma2,tau2";
  for (int j = 0; j < p; ++j) os << ",beta_" << j;
  for (int j = 0; j < p; ++j) os << ",se_" << j;
  os << "\n";
  for (const MetricRow& r : rows) {
    os << r.scenario << ',' << ArmName(r.arm) << ',' << FormatDouble(r.epsilon0)
       << ',' << r.K << ',' << r.replicate << ',' << r.N << ','
       << CorrectionName(r.correction) << ',' << FitStatusName(r.status) << ','
       << FormatDouble(r.l2_error) << ',' << FormatDouble(r.l2_privacy_cost)
       << ',' << FormatDouble(r.se_inflation) << ',' << FormatDouble(r.sigma2)
       << ',' << FormatDouble(r.tau2);
    for (int j = 0; j < p; ++j) {
      os << ',' << (j < r.beta.size() ? FormatDouble(r.beta(j)) : "");
    }
    for (int j = 0; j < p; ++j) {
      os << ',' << (j < r.se.size() ? FormatDouble(r.se(j)) : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string CalibrationCsv(const std::vector<CalibrationRow>& rows) {
  std::ostringstream os;
  os << "scenario,arm,epsilon0,K,correction,coefficient,used,excluded,mean_se,"
        "sd_beta,ratio,degenerate\n";
  for (const CalibrationRow& c : rows) {
    os << c.scenario << ',' << ArmName(c.arm) << ',' << FormatDouble(c.epsilon0)
       << ',' << c.K << ',' << CorrectionName(c.correction) << ','
       << c.coefficient << ',' << c.used << ',' << c.excluded << ','
       << FormatDouble(c.mean_se) << ',' << FormatDouble(c.sd_beta) << ','
       << FormatDouble(c.ratio) << ',' << (c.degenerate ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string ReconstructionCsv(const std::vector<ReconstructionCell>& cells) {
  std::ostringstream os;
  os << "n,p,epsilon0,matrix_rate,element_rate,reps,unique,multiple,repaired,"
        "failed\n";
  for (const ReconstructionCell& c : cells) {
    os << c.n << ',' << c.p << ','
       << (c.epsilon0 ? FormatDouble(*c.epsilon0) : std::string("ref")) << ','
       << FormatDouble(c.matrix_rate) << ',' << FormatDouble(c.element_rate)
       << ',' << c.reps << ',' << c.unique << ',' << c.multiple << ','
       << c.repaired << ',' << c.failed << "\n";
  }
  return os.str();
}

}  // namespace fedlmm
