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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "fedlmm/attack.h"
#include "fedlmm/errors.h"
#include "fedlmm/privacy.h"
#include "fedlmm/simharness.h"
#include "oracle.h"

namespace fedlmm {
namespace {

BinaryMatrix Rows(int p, std::initializer_list<std::initializer_list<int>> rows) {
  BinaryMatrix m(static_cast<int>(rows.size()), p);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (int v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(Reconstruct, CardiologyInstanceIsUnique) {
  Eigen::Matrix3i gram;
  gram << 1, 0, 0, 0, 1, 0, 0, 0, 0;
  const AttackResult r = Reconstruct({gram, 3});
  EXPECT_EQ(r.status, AttackStatus::kUnique);
  EXPECT_EQ(r.violation, 0);
  ASSERT_TRUE(r.x_hat.has_value());
  const BinaryMatrix truth = Rows(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  EXPECT_EQ(HammingSorted(*r.x_hat, truth), 0);
  EXPECT_EQ(CountFeasible({gram, 3}, 100), 1);
}

TEST(Reconstruct, ZeroGramGivesZeroMatrix) {
  for (int n : {0, 1, 5, 40}) {
    const AttackResult r = Reconstruct({Eigen::MatrixXi::Zero(4, 4), n});
    EXPECT_EQ(r.status, AttackStatus::kUnique) << n;
    ASSERT_TRUE(r.x_hat.has_value());
    EXPECT_EQ(r.x_hat->rows(), n);
    EXPECT_EQ(r.x_hat->cwiseAbs().sum(), 0);
  }
}

TEST(Reconstruct, AgreesWithExhaustiveFibers) {
  for (int p = 1; p <= 3; ++p) {
    for (int n = 1; n <= 4; ++n) {
      const oracle::Fibers fibers = oracle::EnumerateFibers(n, p);
      for (const auto& [key, members] : fibers) {
        const FeasibilityInstance inst{oracle::GramFromKey(key, p), n};
        EXPECT_EQ(CountFeasible(inst, 1000),
                  static_cast<std::int64_t>(members.size()))
            << "n=" << n << " p=" << p;
        const AttackResult r = Reconstruct(inst);
        ASSERT_TRUE(r.x_hat.has_value());
        EXPECT_EQ(r.violation, 0);
        // Soundness: the returned matrix reproduces the Gram exactly.
        EXPECT_EQ(Eigen::MatrixXi(r.x_hat->transpose() * *r.x_hat), inst.gram);
        const auto codes = oracle::SortedRowCodes(*r.x_hat);
        EXPECT_NE(std::find(members.begin(), members.end(), codes),
                  members.end());
        EXPECT_EQ(r.status, members.size() == 1 ? AttackStatus::kUnique
                                                : AttackStatus::kFeasibleMultiple);
      }
    }
  }
}

TEST(Reconstruct, SingletonFibersRecoverEveryDesign) {
  for (int p = 1; p <= 3; ++p) {
    for (int n = 1; n <= 4; ++n) {
      const oracle::Fibers fibers = oracle::EnumerateFibers(n, p);
      const long total = 1L << (n * p);
      BinaryMatrix x(n, p);
      for (long code = 0; code < total; ++code) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < p; ++j) x(i, j) = (code >> (i * p + j)) & 1;
        }
        const Eigen::MatrixXi g = x.transpose() * x;
        if (fibers.at(oracle::GramKeyOf(g)).size() != 1) continue;
        const AttackResult r = AttackPipeline(x, std::nullopt, 0);
        EXPECT_EQ(r.violation, 0);
        EXPECT_EQ(r.hamming, 0);
        EXPECT_EQ(r.matrix_rate, 1);
        EXPECT_EQ(r.element_rate, 1.0);
      }
    }
  }
}

TEST(Reconstruct, RepairReachesMinimumViolation) {
  // Every symmetric integer Gram with entries in [-1, n + 1].
  for (int p = 1; p <= 2; ++p) {
    for (int n = 1; n <= 3; ++n) {
      const oracle::Fibers fibers = oracle::EnumerateFibers(n, p);
      const int entries = p * (p + 1) / 2;
      const int base = n + 3;
      int combos = 1;
      for (int e = 0; e < entries; ++e) combos *= base;
      for (int c = 0; c < combos; ++c) {
        oracle::GramKey key;
        for (int e = 0, rest = c; e < entries; ++e, rest /= base) {
          key.push_back(rest % base - 1);
        }
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (const auto& [fk, members] : fibers) {
          std::int64_t v = 0;
          for (int e = 0; e < entries; ++e) v += std::abs(fk[e] - key[e]);
          best = std::min(best, v);
        }
        const AttackResult r = Reconstruct({oracle::GramFromKey(key, p), n});
        EXPECT_EQ(r.violation, best);
        if (best == 0) {
          EXPECT_NE(r.status, AttackStatus::kInfeasibleRepaired);
        } else {
          EXPECT_EQ(r.status, AttackStatus::kInfeasibleRepaired);
          EXPECT_EQ(CountFeasible({oracle::GramFromKey(key, p), n}, 10), 0);
        }
      }
    }
  }
}

TEST(Reconstruct, CapacityAndShapeErrors) {
  AttackConfig cfg;
  cfg.p_max = 4;
  EXPECT_THROW(Reconstruct({Eigen::MatrixXi::Zero(5, 5), 3}, cfg),
               ValidationError);
  Eigen::Matrix2i asym;
  asym << 1, 0, 1, 1;
  EXPECT_THROW(Reconstruct({asym, 3}), ValidationError);
  EXPECT_THROW(AttackPipeline(BinaryMatrix::Constant(2, 2, 2), std::nullopt, 0),
               ValidationError);
  EXPECT_THROW(AttackPipeline(BinaryMatrix::Zero(2, 13), std::nullopt, 0),
               ValidationError);
}

TEST(Reconstruct, TimeoutReportsFailure) {
  AttackConfig cfg;
  cfg.timeout_seconds = 0.0;
  // Infeasible and large enough that the search cannot finish instantly.
  Eigen::MatrixXi g = Eigen::MatrixXi::Constant(10, 10, 7);
  g.diagonal().setConstant(40);
  const AttackResult r = Reconstruct({g, 60}, cfg);
  EXPECT_EQ(r.status, AttackStatus::kFailed);
  EXPECT_EQ(CountFeasible({g, 60}, 10, cfg), -1);
}

TEST(HammingSorted, Examples) {
  const BinaryMatrix a = Rows(2, {{0, 0}, {1, 1}});
  EXPECT_EQ(HammingSorted(a, a), 0);
  EXPECT_EQ(HammingSorted(a, Rows(2, {{1, 1}, {0, 0}})), 0);
  EXPECT_EQ(HammingSorted(a, Rows(2, {{0, 1}, {1, 1}})), 1);
  EXPECT_THROW(HammingSorted(a, BinaryMatrix::Zero(3, 2)), ValidationError);
}

TEST(RoundGram, RoundsUpperTriangleAndMirrors) {
  Eigen::Matrix2d noisy;
  noisy << 1.4, 0.6, -3.0, 2.5;
  const Eigen::MatrixXi g = RoundGram(noisy, 2, false);
  EXPECT_EQ(g(0, 0), 1);
  EXPECT_EQ(g(0, 1), 1);
  EXPECT_EQ(g(1, 0), 1);
  EXPECT_EQ(g(1, 1), 3);
  const Eigen::MatrixXi c = RoundGram(noisy, 2, true);
  EXPECT_EQ(c(1, 1), 2);
  EXPECT_EQ(c(0, 1), 1);
  Eigen::Matrix2d neg;
  neg << -2.0, 5.0, 5.0, 1.0;
  const Eigen::MatrixXi cn = RoundGram(neg, 3, true);
  EXPECT_EQ(cn(0, 0), 0);
  EXPECT_EQ(cn(0, 1), 0);
}

TEST(AttackPipeline, RowPermutationLeavesMetricsUnchanged) {
  Rng rng(61);
  CalibrationRule rule;
  rule.epsilon0 = 8.0;
  const PrivacyBudget b = Calibrate(rule, 0.01, 3);
  for (int rep = 0; rep < 50; ++rep) {
    const BinaryMatrix x = RandomBinaryMatrix(5, 3, 0.5, rng);
    BinaryMatrix y = x;
    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[0], perm[2]);
    for (int i = 0; i < 5; ++i) y.row(i) = x.row(perm[i]);
    for (const auto& budget : {std::optional<PrivacyBudget>(), std::optional(b)}) {
      const AttackResult r1 = AttackPipeline(x, budget, 100 + rep);
      const AttackResult r2 = AttackPipeline(y, budget, 100 + rep);
      EXPECT_EQ(r1.status, r2.status);
      EXPECT_EQ(r1.hamming, r2.hamming);
      EXPECT_EQ(r1.matrix_rate, r2.matrix_rate);
      EXPECT_EQ(r1.violation, r2.violation);
    }
  }
}

TEST(AttackPipeline, MetricsAreConsistent) {
  Rng rng(62);
  CalibrationRule rule;
  rule.epsilon0 = 4.0;
  const PrivacyBudget b = Calibrate(rule, 0.01, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const BinaryMatrix x = RandomBinaryMatrix(4, 3, 0.5, rng);
    const AttackResult r = AttackPipeline(x, b, rep);
    ASSERT_TRUE(r.x_hat.has_value());
    EXPECT_DOUBLE_EQ(r.element_rate, 1.0 - r.hamming / 12.0);
    if (r.status == AttackStatus::kUnique) EXPECT_EQ(r.violation, 0);
    if (r.matrix_rate == 1) EXPECT_EQ(r.hamming, 0);
    EXPECT_GE(r.element_rate, 0.0);
    EXPECT_LE(r.element_rate, 1.0);
  }
}

}  // namespace
}  // namespace fedlmm
