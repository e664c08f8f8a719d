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

#ifndef FEDLMM_SUMMARY_IO_H_
#define FEDLMM_SUMMARY_IO_H_

#include <string>

#include "fedlmm/summary.h"

namespace fedlmm {

// Summary exchange file, schema version 1:
//   {schema_version, site_id, n, p, layout: "y-first", S: [(p+1)^2 row-major],
//    T: [...], privatized, budget: {epsilon, delta, delta_f, sigma_dp} | null}
// plus an optional "covariates" label array. Doubles are written in shortest
// round-trip form, so write/read is bitwise lossless.
inline constexpr int kSummarySchemaVersion = 1;

std::string SummaryToJson(const SiteSummary& summary);
SiteSummary SummaryFromJson(const std::string& text);

void WriteSummaryFile(const std::string& path, const SiteSummary& summary);
SiteSummary ReadSummaryFile(const std::string& path);

}  // namespace fedlmm

#endif  // FEDLMM_SUMMARY_IO_H_
