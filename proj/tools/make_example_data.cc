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

// Writes the bundled example CSV (site,y,x1..x6) to stdout: 40 sites from
// the random-intercept generator with an even small/large site-size split.

#include <cmath>
#include <cstdio>

#include "fedlmm/simharness.h"

namespace {

constexpr int kSites = 40;
constexpr double kSmallSiteProbability = 0.5;
constexpr unsigned long long kSeed = 20260417ULL;

double Round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

int main() {
  fedlmm::Scenario s = fedlmm::Scenario::Named("ri-correct", kSites);
  s.small_site_probability = kSmallSiteProbability;
  const auto sites = fedlmm::Generate(s, kSeed);
  std::printf("site,y,x1,x2,x3,x4,x5,x6\n");
  for (const auto& site : sites) {
    for (int i = 0; i < site.n(); ++i) {
      std::printf("%s,%.4f", site.site_id.c_str(), Round4(site.y(i)));
      for (int c = 1; c < 7; ++c) {
        if (c == 2 || c == 6) {
          std::printf(",%.4f", Round4(site.X(i, c)));
        } else {
          std::printf(",%d", static_cast<int>(site.X(i, c)));
        }
      }
      std::printf("\n");
    }
  }
  return 0;
}
