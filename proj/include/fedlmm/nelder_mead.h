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

#ifndef FEDLMM_NELDER_MEAD_H_
#define FEDLMM_NELDER_MEAD_H_

#include <functional>

#include <Eigen/Dense>

namespace fedlmm {

struct NelderMeadOptions {
  double f_tol = 1e-10;      // absolute spread of simplex values
  double x_tol = 1e-8;       // simplex size relative to 1 + |x|
  int max_evaluations = 2000;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Minimizes `f`. Non-finite values are treated as +infinity, which lets the
// caller mark infeasible points. Standard coefficients (1, 2, 0.5, 0.5).
NelderMeadResult NelderMeadMinimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& start, const NelderMeadOptions& options);

}  // namespace fedlmm

#endif  // FEDLMM_NELDER_MEAD_H_
