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

#include "fedlmm/summary_kernels.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fedlmm {
namespace {

// Neumaier running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void Add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double Value() const { return sum + carry; }
};

inline double ZAt(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int i,
                  int j) {
  return j == 0 ? y(i) : X(i, j - 1);
}

void MirrorUpper(Eigen::MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
  }
}

// Plain accumulation of rows [begin, end) into the upper triangle.
void AccumulateBlock(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     int begin, int end, Eigen::MatrixXd& gram,
                     Eigen::VectorXd& sums) {
  const int d = static_cast<int>(X.cols()) + 1;
  gram.setZero(d, d);
  sums.setZero(d);
  for (int i = begin; i < end; ++i) {
    for (int a = 0; a < d; ++a) {
      const double za = ZAt(y, X, i, a);
      sums(a) += za;
      for (int b = a; b < d; ++b) gram(a, b) += za * ZAt(y, X, i, b);
    }
  }
}

}  // namespace

namespace kernels {

CrossProducts CrossProductsSerial(const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(y.size());
  const int d = static_cast<int>(X.cols()) + 1;
  CrossProducts out;
  if (n <= kCompensatedThreshold) {
    AccumulateBlock(y, X, 0, n, out.gram, out.sums);
    MirrorUpper(out.gram);
    return out;
  }
  std::vector<CompensatedSum> gram(static_cast<size_t>(d) * d), sums(d);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) {
      const double za = ZAt(y, X, i, a);
      sums[a].Add(za);
      for (int b = a; b < d; ++b) gram[a * d + b].Add(za * ZAt(y, X, i, b));
    }
  }
  out.gram.setZero(d, d);
  out.sums.setZero(d);
  for (int a = 0; a < d; ++a) {
    out.sums(a) = sums[a].Value();
    for (int b = a; b < d; ++b) out.gram(a, b) = gram[a * d + b].Value();
  }
  MirrorUpper(out.gram);
  return out;
}

CrossProducts CrossProductsParallel(const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(y.size());
  const int d = static_cast<int>(X.cols()) + 1;
  const int blocks = (n + kRowBlock - 1) / kRowBlock;
  std::vector<Eigen::MatrixXd> block_gram(blocks);
  std::vector<Eigen::VectorXd> block_sums(blocks);

#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    const int begin = b * kRowBlock;
    const int end = std::min(n, begin + kRowBlock);
    AccumulateBlock(y, X, begin, end, block_gram[b], block_sums[b]);
  }

  std::vector<CompensatedSum> gram(static_cast<size_t>(d) * d), sums(d);
  for (int b = 0; b < blocks; ++b) {
    for (int a = 0; a < d; ++a) {
      sums[a].Add(block_sums[b](a));
      for (int c = a; c < d; ++c) gram[a * d + c].Add(block_gram[b](a, c));
    }
  }
  CrossProducts out;
  out.gram.setZero(d, d);
  out.sums.setZero(d);
  for (int a = 0; a < d; ++a) {
    out.sums(a) = sums[a].Value();
    for (int c = a; c < d; ++c) out.gram(a, c) = gram[a * d + c].Value();
  }
  MirrorUpper(out.gram);
  return out;
}

}  // namespace kernels

CrossProducts ComputeCrossProducts(const Eigen::VectorXd& y,
                                   const Eigen::MatrixXd& X,
                                   Execution execution) {
  return execution == Execution::kParallel
             ? kernels::CrossProductsParallel(y, X)
             : kernels::CrossProductsSerial(y, X);
}

}  // namespace fedlmm
