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

#include "fedlmm/summary_io.h"

#include <fstream>
#include <sstream>

#include "fedlmm/errors.h"
#include "json.hpp"

namespace fedlmm {
namespace {

using Json = nlohmann::ordered_json;

Json MatrixToArray(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  }
  return a;
}

Eigen::MatrixXd ArrayToMatrix(const Json& a, int dim, const char* name) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim * dim) {
    throw ValidationError(std::string("field '") + name +
                          "' must be a row-major array of (p+1)^2 numbers");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const Json& v = a[i * dim + j];
      if (!v.is_number()) {
        throw ValidationError(std::string("field '") + name +
                              "' contains a non-numeric entry");
      }
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

template <typename T>
T Require(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw ValidationError(std::string("summary JSON missing field '") + key +
                          "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("summary JSON field '") + key +
                          "' has the wrong type");
  }
}

}  // namespace

std::string SummaryToJson(const SiteSummary& s) {
  Json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["site_id"] = s.site_id;
  j["n"] = s.n;
  j["p"] = s.p();
  j["layout"] = "y-first";
  j["S"] = MatrixToArray(s.S);
  j["T"] = MatrixToArray(s.T);
  j["privatized"] = s.privatized;
  if (s.budget) {
    j["budget"] = {{"epsilon", s.budget->epsilon},
                   {"delta", s.budget->delta},
                   {"delta_f", s.budget->delta_f},
                   {"sigma_dp", s.budget->sigma_dp}};
  } else {
    j["budget"] = nullptr;
  }
  if (!s.covariates.empty()) j["covariates"] = s.covariates;
  return j.dump(2) + "\n";
}

SiteSummary SummaryFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("summary JSON does not parse: ") +
                          e.what());
  }
  if (!j.is_object()) throw ValidationError("summary JSON must be an object");
  const int version = Require<int>(j, "schema_version");
  if (version != kSummarySchemaVersion) {
    throw ValidationError("unsupported summary schema_version " +
                          std::to_string(version));
  }
  if (Require<std::string>(j, "layout") != "y-first") {
    throw ValidationError("unsupported summary layout");
  }
  SiteSummary s;
  s.site_id = Require<std::string>(j, "site_id");
  s.n = Require<std::int64_t>(j, "n");
  const int p = Require<int>(j, "p");
  if (p < 1) throw ValidationError("summary p must be positive");
  if (!j.contains("S") || !j.contains("T")) {
    throw ValidationError("summary JSON missing S or T");
  }
  s.S = ArrayToMatrix(j["S"], p + 1, "S");
  s.T = ArrayToMatrix(j["T"], p + 1, "T");
  s.privatized = Require<bool>(j, "privatized");
  if (j.contains("budget") && !j["budget"].is_null()) {
    const Json& b = j["budget"];
    PrivacyBudget budget;
    budget.epsilon = Require<double>(b, "epsilon");
    budget.delta = Require<double>(b, "delta");
    budget.delta_f = Require<double>(b, "delta_f");
    budget.sigma_dp = Require<double>(b, "sigma_dp");
    s.budget = budget;
  }
  if (j.contains("covariates")) {
    s.covariates = Require<std::vector<std::string>>(j, "covariates");
  }
  ValidateSummary(s);
  return s;
}

void WriteSummaryFile(const std::string& path, const SiteSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << SummaryToJson(summary);
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

SiteSummary ReadSummaryFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return SummaryFromJson(buf.str());
}

}  // namespace fedlmm
