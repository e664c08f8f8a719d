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

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fedlmm/attack.h"
#include "fedlmm/csv.h"
#include "fedlmm/errors.h"
#include "fedlmm/estimator.h"
#include "fedlmm/privacy.h"
#include "fedlmm/simharness.h"
#include "fedlmm/summary.h"
#include "fedlmm/summary_io.h"
#include "fedlmm/variance.h"
#include "json.hpp"

#ifndef FEDLMM_DATA_DIR
#define FEDLMM_DATA_DIR "data"
#endif

namespace fedlmm::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kInterceptName = "(Intercept)";

fs::path DefaultOutDir() {
  const char* env = std::getenv("FEDLMM_OUT_DIR");
  return (env != nullptr && *env != '\0') ? fs::path(env) : fs::path(".");
}

// An explicit path wins; otherwise `name` under the default directory.
fs::path OutputPath(const std::string& given, const std::string& name) {
  return given.empty() ? DefaultOutDir() / name : fs::path(given);
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << text;
  if (!f) throw ValidationError("error writing " + path.string());
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseDouble(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("invalid " + what + " '" + s + "'");
  }
}

int ParseInt(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("invalid " + what + " '" + s + "'");
  }
}

// "2,5,10" or "2:20" (inclusive range) or a mix.
std::vector<int> ParseIntList(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const std::string& item : SplitList(s)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(ParseInt(item, what));
      continue;
    }
    const int lo = ParseInt(item.substr(0, colon), what);
    const int hi = ParseInt(item.substr(colon + 1), what);
    if (hi < lo) throw ValidationError("empty " + what + " range " + item);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty " + what + " list");
  return out;
}

std::vector<double> ParseDoubleList(const std::string& s,
                                    const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : SplitList(s)) {
    out.push_back(ParseDouble(item, what));
  }
  if (out.empty()) throw ValidationError("empty " + what + " list");
  return out;
}

// "ref" (or "none") stands for the noise-free reference.
std::vector<std::optional<double>> ParseEpsilonList(const std::string& s) {
  std::vector<std::optional<double>> out;
  for (const std::string& item : SplitList(s)) {
    if (item == "ref" || item == "none") {
      out.push_back(std::nullopt);
    } else {
      out.push_back(ParseDouble(item, "epsilon0"));
    }
  }
  if (out.empty()) throw ValidationError("empty epsilon0 list");
  return out;
}

void CheckSiteIdForFile(const std::string& id) {
  const bool ok =
      !id.empty() && id != "." && id != ".." &&
      std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
      });
  if (!ok) {
    throw ValidationError("site id '" + id +
                          "' is not usable as a file name (allowed: letters, "
                          "digits, '-', '_', '.')");
  }
}

Json NumberOrNull(double v) { return std::isfinite(v) ? Json(v) : Json(); }

// ---------------------------------------------------------------- summarize

struct SummarizeArgs {
  std::string csv;
  std::string outcome;
  std::string covariates;
  std::string site_col;
  std::string site_id;
  bool no_intercept = false;
  std::string out_dir;
};

std::vector<SiteData> SitesFromCsv(const CsvTable& table,
                                   const SummarizeArgs& a,
                                   std::vector<std::string>* labels) {
  if (!a.site_col.empty() && !a.site_id.empty()) {
    throw ValidationError("use either --site-col or --site-id, not both");
  }
  const std::vector<std::string> names = SplitList(a.covariates);
  if (names.empty() && a.no_intercept) {
    throw ValidationError("model has no columns: give --covariates or keep "
                          "the intercept");
  }
  const int y_col = table.Column(a.outcome);
  std::vector<int> x_cols;
  for (const std::string& n : names) x_cols.push_back(table.Column(n));
  const int site_col = a.site_col.empty() ? -1 : table.Column(a.site_col);

  labels->clear();
  if (!a.no_intercept) labels->push_back(kInterceptName);
  labels->insert(labels->end(), names.begin(), names.end());
  const int p = static_cast<int>(labels->size());

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string id = site_col >= 0 ? table.rows[r][site_col]
                                   : (a.site_id.empty() ? "site" : a.site_id);
    auto it = rows_of.find(id);
    if (it == rows_of.end()) {
      order.push_back(id);
      it = rows_of.emplace(id, std::vector<std::size_t>{}).first;
    }
    it->second.push_back(r);
  }
  std::vector<SiteData> sites;
  for (const std::string& id : order) {
    CheckSiteIdForFile(id);
    const auto& rows = rows_of[id];
    SiteData s;
    s.site_id = id;
    s.y.resize(rows.size());
    s.X.resize(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s.y(i) = table.Number(rows[i], y_col);
      int c = 0;
      if (!a.no_intercept) s.X(i, c++) = 1.0;
      for (int col : x_cols) s.X(i, c++) = table.Number(rows[i], col);
    }
    sites.push_back(std::move(s));
  }
  return sites;
}

std::vector<fs::path> DoSummarize(const SummarizeArgs& a, std::ostream& out) {
  const CsvTable table = ReadCsv(a.csv);
  std::vector<std::string> labels;
  const std::vector<SiteData> sites = SitesFromCsv(table, a, &labels);
  const fs::path dir = a.out_dir.empty() ? DefaultOutDir() : fs::path(a.out_dir);
  // Validate everything before writing any file.
  std::vector<SiteSummary> summaries;
  for (const SiteData& s : sites) {
    SiteSummary sum = ComputeSummary(s);
    sum.covariates = labels;
    summaries.push_back(std::move(sum));
  }
  std::vector<fs::path> written;
  for (const SiteSummary& s : summaries) {
    const fs::path path = dir / (s.site_id + ".json");
    WriteText(path, SummaryToJson(s));
    out << "wrote " << path.string() << " (n=" << s.n << ")\n";
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------- privatize

struct PrivatizeArgs {
  std::string in;
  std::string out;
  double epsilon0 = 0.0;
  double epsilon = 0.0;
  double delta_f = 0.0;
  double delta = 1e-4;
  std::string scope = "full";
  std::string sensitive;
  std::uint64_t seed = 0;
};

std::vector<int> ResolveSensitive(const std::string& list,
                                  const SiteSummary& s) {
  std::vector<int> idx;
  for (const std::string& item : SplitList(list)) {
    const bool numeric = std::all_of(item.begin(), item.end(), ::isdigit);
    if (numeric) {
      idx.push_back(ParseInt(item, "sensitive index"));
      continue;
    }
    const auto it = std::find(s.covariates.begin(), s.covariates.end(), item);
    if (it == s.covariates.end()) {
      throw ValidationError("sensitive covariate '" + item +
                            "' is not among the summary's covariate labels");
    }
    idx.push_back(static_cast<int>(it - s.covariates.begin()) + 1);
  }
  return idx;
}

PrivacyBudget BudgetFromArgs(const PrivatizeArgs& a, int p) {
  CalibrationRule rule;
  if (a.epsilon0 > 0.0) {
    if (a.epsilon > 0.0) {
      throw ValidationError("use either --epsilon0 or --epsilon, not both");
    }
    rule.mode = CalibrationMode::kDimensionAdjusted;
    rule.epsilon0 = a.epsilon0;
  } else if (a.epsilon > 0.0) {
    rule.mode = CalibrationMode::kFixedEpsilon;
    rule.epsilon = a.epsilon;
    rule.delta_f = a.delta_f;
  } else {
    throw ValidationError("a positive --epsilon0 or --epsilon is required");
  }
  return Calibrate(rule, a.delta, p);
}

SiteSummary DoPrivatize(const PrivatizeArgs& a, std::ostream& out) {
  const SiteSummary in = ReadSummaryFile(a.in);
  const PrivacyBudget budget = BudgetFromArgs(a, in.p());
  PrivatizationScope scope;
  if (a.scope == "full") {
    if (!a.sensitive.empty()) {
      throw ValidationError("--sensitive needs --scope subset");
    }
    scope = PrivatizationScope::Full();
  } else if (a.scope == "subset") {
    scope = PrivatizationScope::Subset(ResolveSensitive(a.sensitive, in));
    if (scope.sensitive.empty()) {
      throw ValidationError("--scope subset needs --sensitive");
    }
  } else {
    throw ValidationError("--scope must be full or subset");
  }
  SiteSummary noisy = Privatize(in, budget, scope, a.seed);
  const fs::path path =
      OutputPath(a.out, in.site_id + "_dp.json");
  WriteText(path, SummaryToJson(noisy));
  out << "wrote " << path.string() << " (sigma_dp=" << FormatDouble(budget.sigma_dp)
      << ")\n";
  return noisy;
}

// ---------------------------------------------------------------------- fit

struct FitArgs {
  std::vector<std::string> inputs;
  std::string method = "ml";
  std::string correction = "cr0";
  double level = 0.95;
  bool t_critical = false;
  std::string out;
  std::string csv;
};

struct FitReport {
  FitResult fit;
  RobustVariance variance;
  std::vector<WaldInterval> ci;
  std::vector<std::string> names;
};

FitReport DoFit(const FitArgs& a, std::ostream& out) {
  if (a.inputs.empty()) throw ValidationError("no summary files given");
  if (!(a.level > 0.0 && a.level < 1.0)) {
    throw ValidationError("--level must lie in (0, 1)");
  }
  const Correction correction = ParseCorrection(a.correction);
  std::vector<SiteSummary> sites;
  for (const std::string& f : a.inputs) sites.push_back(ReadSummaryFile(f));
  const FederatedSummarySet set = MergeSummaries(std::move(sites));

  FitReport r;
  if (a.method == "ml") {
    r.fit = FitMl(set);
  } else if (a.method == "reml") {
    r.fit = FitReml(set);
  } else {
    throw ValidationError("--method must be ml or reml");
  }
  r.variance = ApplyCorrection(Cr0(set, r.fit), correction);
  r.ci = WaldCi(r.fit, r.variance, a.level,
                a.t_critical ? CriticalValue::kStudentT : CriticalValue::kNormal);
  r.names = set[0].covariates;
  if (static_cast<int>(r.names.size()) != set.p()) {
    r.names.clear();
    for (int j = 0; j < set.p(); ++j) r.names.push_back("b" + std::to_string(j));
  }

  Json j;
  j["method"] = MethodName(r.fit.method);
  j["converged"] = r.fit.converged;
  j["objective"] = NumberOrNull(r.fit.objective);
  j["evaluations"] = r.fit.iterations;
  j["boundary_tau"] = r.fit.boundary_tau;
  j["condition"] = NumberOrNull(r.fit.condition);
  j["K"] = set.size();
  j["N"] = set.total_n();
  j["privatized"] = set.any_privatized();
  j["sigma2"] = r.fit.theta_hat.sigma2;
  j["tau2"] = r.fit.theta_hat.tau2;
  j["correction"] = CorrectionName(correction);
  j["level"] = a.level;
  j["critical"] = a.t_critical ? "t" : "normal";
  Json coefs = Json::array();
  for (std::size_t k = 0; k < r.ci.size(); ++k) {
    Json c;
    c["name"] = r.names[k];
    c["estimate"] = r.ci[k].estimate;
    c["se"] = r.ci[k].se;
    c["ci_lo"] = r.ci[k].lo;
    c["ci_hi"] = r.ci[k].hi;
    coefs.push_back(c);
  }
  j["coefficients"] = coefs;
  Json v = Json::array();
  for (int i = 0; i < r.variance.V.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < r.variance.V.cols(); ++k) row.push_back(r.variance.V(i, k));
    v.push_back(row);
  }
  j["V"] = v;

  std::ostringstream csv;
  csv << "coefficient,estimate,se,ci_lo,ci_hi,correction\n";
  for (std::size_t k = 0; k < r.ci.size(); ++k) {
    csv << r.names[k] << ',' << FormatDouble(r.ci[k].estimate) << ','
        << FormatDouble(r.ci[k].se) << ',' << FormatDouble(r.ci[k].lo) << ','
        << FormatDouble(r.ci[k].hi) << ',' << CorrectionName(correction)
        << "\n";
  }
  const fs::path json_path = OutputPath(a.out, "fit.json");
  const fs::path csv_path = OutputPath(a.csv, "coefficients.csv");
  WriteText(json_path, j.dump(2) + "\n");
  WriteText(csv_path, csv.str());

  out << MethodName(r.fit.method) << " fit on K=" << set.size()
      << " sites, N=" << set.total_n()
      << (r.fit.converged ? "" : " (NOT converged)") << "\n";
  out << "sigma2=" << FormatDouble(r.fit.theta_hat.sigma2)
      << " tau2=" << FormatDouble(r.fit.theta_hat.tau2) << "\n";
  out << std::left << std::setw(14) << "coefficient" << std::right
      << std::setw(12) << "estimate" << std::setw(12) << "se" << "\n";
  for (std::size_t k = 0; k < r.ci.size(); ++k) {
    out << std::left << std::setw(14) << r.names[k] << std::right
        << std::setw(12) << std::setprecision(5) << r.ci[k].estimate
        << std::setw(12) << r.ci[k].se << "\n";
  }
  out << "wrote " << json_path.string() << ", " << csv_path.string() << "\n";
  return r;
}

// ------------------------------------------------------------------- attack

struct AttackArgs {
  int n = 3;
  int p = 3;
  std::string epsilon0 = "8";
  double delta = 0.01;
  int reps = 1000;
  std::uint64_t seed = 0;
  double timeout = 10.0;
  bool clamp = false;
  std::string out;
};

void DoAttack(const AttackArgs& a, std::ostream& out) {
  AttackConfig config;
  config.timeout_seconds = a.timeout;
  config.clamp = a.clamp;
  std::vector<ReconstructionCell> cells;
  for (const auto& eps : ParseEpsilonList(a.epsilon0)) {
    cells.push_back(
        RunReconstructionCell(a.n, a.p, eps, a.delta, a.reps, a.seed, config));
  }
  std::ostringstream csv;
  csv << "n,p,epsilon0,matrix_rate,element_rate,reps\n";
  for (const ReconstructionCell& c : cells) {
    const std::string e = c.epsilon0 ? FormatDouble(*c.epsilon0) : "ref";
    csv << c.n << ',' << c.p << ',' << e << ',' << FormatDouble(c.matrix_rate)
        << ',' << FormatDouble(c.element_rate) << ',' << c.reps << "\n";
    out << "eps0=" << e << " matrix_rate=" << FormatDouble(c.matrix_rate)
        << " element_rate=" << FormatDouble(c.element_rate) << "\n";
  }
  const fs::path path = OutputPath(a.out, "rates.csv");
  WriteText(path, csv.str());
  out << "wrote " << path.string() << "\n";
}

// ------------------------------------------------------- simulate-*

struct SimEstimationArgs {
  std::string scenario = "ri-correct";
  std::string K = "20,50,100,200";
  std::string epsilon0 = "2,4,8,12,16";
  int reps = 1000;
  std::uint64_t seed = 0;
  std::string correction = "cr0";
  std::string out;
  std::string calibration;
  bool serial = false;
};

void DoSimulateEstimation(const SimEstimationArgs& a, std::ostream& out) {
  const std::vector<int> ks = ParseIntList(a.K, "K");
  const std::vector<double> eps = ParseDoubleList(a.epsilon0, "epsilon0");
  std::vector<Scenario> scenarios;
  for (const std::string& id : SplitList(a.scenario)) {
    for (int K : ks) scenarios.push_back(Scenario::Named(id, K));
  }
  if (scenarios.empty()) throw ValidationError("no scenario given");
  StudyOptions options;
  options.correction = ParseCorrection(a.correction);
  options.execution = a.serial ? Execution::kSerial : Execution::kParallel;
  std::vector<MetricRow> rows;
  for (const Scenario& s : scenarios) {
    auto part = RunEstimationStudy(s, eps, a.reps, a.seed, options);
    out << s.id << " K=" << s.K << ": " << part.size() << " rows\n";
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  const fs::path path = OutputPath(a.out, "metrics.csv");
  WriteText(path, MetricRowsCsv(rows));
  out << "wrote " << path.string() << "\n";
  const fs::path cal = OutputPath(a.calibration, "calibration.csv");
  WriteText(cal, CalibrationCsv(SeCalibration(rows)));
  out << "wrote " << cal.string() << "\n";
}

struct SimReconstructionArgs {
  std::string n = "2:20";
  std::string p = "3,5,10";
  std::string epsilon0 = "ref,1,2,4,6,8,10,12,16,20";
  double delta = 0.01;
  int reps = 1000;
  std::uint64_t seed = 0;
  double timeout = 10.0;
  std::string out;
};

void DoSimulateReconstruction(const SimReconstructionArgs& a,
                              std::ostream& out) {
  AttackConfig config;
  config.timeout_seconds = a.timeout;
  std::vector<ReconstructionCell> cells;
  const auto eps = ParseEpsilonList(a.epsilon0);
  for (int p : ParseIntList(a.p, "p")) {
    for (int n : ParseIntList(a.n, "n")) {
      for (const auto& e : eps) {
        cells.push_back(
            RunReconstructionCell(n, p, e, a.delta, a.reps, a.seed, config));
      }
    }
    out << "p=" << p << " done\n";
  }
  const fs::path path = OutputPath(a.out, "reconstruction.csv");
  WriteText(path, ReconstructionCsv(cells));
  out << "wrote " << path.string() << "\n";
}

// ----------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::string data = std::string(FEDLMM_DATA_DIR) + "/example_sites.csv";
  std::string out_dir;
  double epsilon0 = 4.0;
  std::uint64_t seed = 7;
};

constexpr const char* kBundleOutcome = "y";
constexpr const char* kBundleCovariates = "x1,x2,x3,x4,x5,x6";
constexpr const char* kBundleBinary[] = {"x1", "x3", "x4", "x5"};

void DoPipeline(const PipelineArgs& a, std::ostream& out) {
  const fs::path dir = a.out_dir.empty() ? DefaultOutDir() / "pipeline"
                                         : fs::path(a.out_dir);
  out << "[1/4] summarize\n";
  SummarizeArgs sa;
  sa.csv = a.data;
  sa.outcome = kBundleOutcome;
  sa.covariates = kBundleCovariates;
  sa.site_col = "site";
  sa.out_dir = (dir / "summaries").string();
  const std::vector<fs::path> files = DoSummarize(sa, out);

  out << "[2/4] privatize\n";
  std::int64_t N = 0;
  for (const fs::path& f : files) N += ReadSummaryFile(f.string()).n;
  std::vector<std::string> noisy_files;
  for (const fs::path& f : files) {
    PrivatizeArgs pa;
    pa.in = f.string();
    pa.out = (dir / "summaries_dp" / f.filename()).string();
    pa.epsilon0 = a.epsilon0;
    pa.delta = 1.0 / static_cast<double>(N);
    pa.seed = a.seed;
    DoPrivatize(pa, out);
    noisy_files.push_back(pa.out);
  }

  out << "[3/4] fit\n";
  FitArgs fa;
  for (const fs::path& f : files) fa.inputs.push_back(f.string());
  fa.out = (dir / "fit_ipd.json").string();
  fa.csv = (dir / "coefficients_ipd.csv").string();
  DoFit(fa, out);
  fa.inputs = noisy_files;
  fa.out = (dir / "fit_dp.json").string();
  fa.csv = (dir / "coefficients_dp.csv").string();
  DoFit(fa, out);

  out << "[4/4] attack\n";
  // Audit each site's binary covariate block as the attacker would see it
  // under the same noise level.
  const CsvTable table = ReadCsv(a.data);
  const int site_col = table.Column("site");
  std::vector<int> cols;
  for (const char* c : kBundleBinary) cols.push_back(table.Column(c));
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& id = table.rows[r][site_col];
    if (!rows_of.count(id)) order.push_back(id);
    rows_of[id].push_back(r);
  }
  CalibrationRule rule;
  rule.epsilon0 = a.epsilon0;
  const int p = static_cast<int>(cols.size());
  const PrivacyBudget budget = Calibrate(rule, 1.0 / static_cast<double>(N), p);
  std::ostringstream csv;
  csv << "site,n,p,epsilon0,status,violation,hamming,matrix_match,"
         "element_rate\n";
  for (const std::string& id : order) {
    const auto& rows = rows_of[id];
    BinaryMatrix x(static_cast<int>(rows.size()), p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int j = 0; j < p; ++j) {
        const double v = table.Number(rows[i], cols[j]);
        if (v != 0.0 && v != 1.0) {
          throw ValidationError("bundle column is not binary");
        }
        x(static_cast<int>(i), j) = static_cast<int>(v);
      }
    }
    for (const auto& b : {std::optional<PrivacyBudget>(), std::optional(budget)}) {
      const AttackResult res = AttackPipeline(x, b, MixSeed(a.seed, id));
      csv << id << ',' << x.rows() << ',' << p << ','
          << (b ? FormatDouble(a.epsilon0) : "ref") << ','
          << AttackStatusName(res.status) << ',' << res.violation << ','
          << res.hamming << ',' << res.matrix_rate << ','
          << FormatDouble(res.element_rate) << "\n";
    }
  }
  WriteText(dir / "attack.csv", csv.str());
  out << "wrote " << (dir / "attack.csv").string() << "\n";
}

// --------------------------------------------------------------- dispatch

template <typename F>
int Guarded(F&& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Federated random-intercept LMM from site summaries"};
  app.name("fedlmm");
  app.require_subcommand(1);

  SummarizeArgs sa;
  auto* summarize =
      app.add_subcommand("summarize", "Compute per-site summaries from a CSV");
  summarize->add_option("--csv", sa.csv, "Input CSV with a header")->required();
  summarize->add_option("--outcome", sa.outcome, "Outcome column")->required();
  summarize->add_option("--covariates", sa.covariates,
                        "Comma-separated covariate columns");
  summarize->add_option("--site-col", sa.site_col, "Column holding site ids");
  summarize->add_option("--site-id", sa.site_id,
                        "Site id when the file holds one site");
  summarize->add_flag("--no-intercept", sa.no_intercept, "Omit the intercept");
  summarize->add_option("--out-dir", sa.out_dir, "Output directory");

  PrivatizeArgs pa;
  auto* privatize = app.add_subcommand(
      "privatize", "Release a summary through the Gaussian mechanism");
  privatize->add_option("--in", pa.in, "Summary JSON")->required();
  privatize->add_option("--out", pa.out, "Output JSON");
  privatize->add_option("--epsilon0", pa.epsilon0,
                        "Per-dimension budget; epsilon = 2 p epsilon0 with "
                        "binary-Gram sensitivity 2p");
  privatize->add_option("--epsilon", pa.epsilon,
                        "Total budget (fixed mode, needs --delta-f)");
  privatize->add_option("--delta-f", pa.delta_f,
                        "Frobenius sensitivity for fixed mode");
  privatize->add_option("--delta", pa.delta, "delta in (0, 1)");
  privatize->add_option("--scope", pa.scope, "full or subset");
  privatize->add_option("--sensitive", pa.sensitive,
                        "Summary indices or covariate labels for --scope "
                        "subset");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the model from summary files");
  fit->add_option("inputs", fa.inputs, "Summary JSON files")->required();
  fit->add_option("--method", fa.method, "ml or reml");
  fit->add_option("--correction", fa.correction, "cr0, cr1, cr1p or cr1s");
  fit->add_option("--level", fa.level, "Confidence level");
  fit->add_flag("--t-critical", fa.t_critical,
                "Use t_{K-1} instead of normal quantiles");
  fit->add_option("--out", fa.out, "Report JSON");
  fit->add_option("--csv", fa.csv, "Coefficient table CSV");

  AttackArgs aa;
  auto* attack = app.add_subcommand(
      "attack", "Reconstruction attack on random binary designs");
  attack->add_option("--n", aa.n, "Rows");
  attack->add_option("--p", aa.p, "Binary columns");
  attack->add_option("--epsilon0", aa.epsilon0,
                     "Comma-separated epsilon0 values; 'ref' for no noise");
  attack->add_option("--delta", aa.delta, "delta");
  attack->add_option("--reps", aa.reps, "Replicates");
  attack->add_option("--timeout", aa.timeout, "Solver time limit (seconds)");
  attack->add_flag("--clamp", aa.clamp, "Clamp rounded entries before solving");
  attack->add_option("--out", aa.out, "Rates CSV");

  SimEstimationArgs ea;
  auto* sim_est = app.add_subcommand("simulate-estimation",
                                     "Replicated IPD / DP / DP2 study");
  sim_est->add_option("--scenario", ea.scenario,
                      "ri-correct, ri-mis, ris-correct, ris-mis (comma list)");
  sim_est->add_option("--K", ea.K, "Comma-separated site counts");
  sim_est->add_option("--epsilon0", ea.epsilon0, "Comma-separated epsilon0");
  sim_est->add_option("--reps", ea.reps, "Replicates");
  sim_est->add_option("--correction", ea.correction, "cr0, cr1, cr1p or cr1s");
  sim_est->add_option("--out", ea.out, "Per-replicate metrics CSV");
  sim_est->add_option("--calibration", ea.calibration,
                      "SE calibration table CSV");
  sim_est->add_flag("--serial", ea.serial, "Run replicates serially");

  SimReconstructionArgs ra;
  auto* sim_rec = app.add_subcommand("simulate-reconstruction",
                                     "Reconstruction-rate grid");
  sim_rec->add_option("--n", ra.n, "Rows, e.g. 2:20 or 3,5");
  sim_rec->add_option("--p", ra.p, "Columns, e.g. 3,5,10");
  sim_rec->add_option("--epsilon0", ra.epsilon0,
                      "Comma-separated epsilon0; 'ref' for no noise");
  sim_rec->add_option("--delta", ra.delta, "delta");
  sim_rec->add_option("--reps", ra.reps, "Replicates per cell");
  sim_rec->add_option("--timeout", ra.timeout, "Solver time limit (seconds)");
  sim_rec->add_option("--out", ra.out, "Output CSV");

  PipelineArgs la;
  auto* pipeline = app.add_subcommand(
      "pipeline", "summarize, privatize, fit and attack on a CSV bundle");
  pipeline->add_option("--data", la.data, "Bundle CSV (site,y,x1..x6)");
  pipeline->add_option("--out-dir", la.out_dir, "Artifact directory");
  pipeline->add_option("--epsilon0", la.epsilon0, "Privacy level");

  // Every command takes --seed; commands without randomness ignore it.
  std::uint64_t seed = 0;
  for (CLI::App* sub : {summarize, privatize, fit, attack, sim_est, sim_rec,
                        pipeline}) {
    sub->add_option("--seed", seed, "Root random seed");
  }

  std::vector<const char*> argv;
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  const bool seed_given = pipeline->count("--seed") > 0;

  if (*summarize) return Guarded([&] { DoSummarize(sa, out); }, err);
  if (*privatize) {
    pa.seed = seed;
    return Guarded([&] { DoPrivatize(pa, out); }, err);
  }
  if (*fit) return Guarded([&] { DoFit(fa, out); }, err);
  if (*attack) {
    aa.seed = seed;
    return Guarded([&] { DoAttack(aa, out); }, err);
  }
  if (*sim_est) {
    ea.seed = seed;
    return Guarded([&] { DoSimulateEstimation(ea, out); }, err);
  }
  if (*sim_rec) {
    ra.seed = seed;
    return Guarded([&] { DoSimulateReconstruction(ra, out); }, err);
  }
  if (*pipeline) {
    if (seed_given) la.seed = seed;
    return Guarded([&] { DoPipeline(la, out); }, err);
  }
  return kExitValidation;
}

}  // namespace fedlmm::cli
