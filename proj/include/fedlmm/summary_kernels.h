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

#ifndef FEDLMM_SUMMARY_KERNELS_H_
#define FEDLMM_SUMMARY_KERNELS_H_

#include <Eigen/Dense>

namespace fedlmm {

enum class Execution { kSerial, kParallel };

// Row count above which accumulation switches to compensated summation.
inline constexpr int kCompensatedThreshold = 10000;

// Rows per work block in the parallel kernel. Fixed, so the result does not
// depend on the number of threads.
inline constexpr int kRowBlock = 2048;

struct CrossProducts {
  Eigen::MatrixXd gram;  // Z'Z with Z = [y X]
  Eigen::VectorXd sums;  // 1'Z
};

namespace kernels {

// Reference implementation: one pass over rows, outer products accumulated
// entry by entry (Neumaier-compensated when n > kCompensatedThreshold).
CrossProducts CrossProductsSerial(const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& X);

// OpenMP version: fixed row blocks accumulated in parallel, then reduced in
// block order with compensation. Deterministic for any thread count.
CrossProducts CrossProductsParallel(const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& X);

}  // namespace kernels

CrossProducts ComputeCrossProducts(const Eigen::VectorXd& y,
                                   const Eigen::MatrixXd& X,
                                   Execution execution);

}  // namespace fedlmm

#endif  // FEDLMM_SUMMARY_KERNELS_H_
