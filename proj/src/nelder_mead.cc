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

#include "fedlmm/nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fedlmm {

NelderMeadResult NelderMeadMinimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  const int d = static_cast<int>(start.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<Eigen::VectorXd> simplex(d + 1, start);
  std::vector<double> values(d + 1);
  for (int i = 0; i < d; ++i) simplex[i + 1](i) += options.initial_step;
  for (int i = 0; i <= d; ++i) values[i] = eval(simplex[i]);

  std::vector<int> order(d + 1);
  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[d - 1];

    double size = 0.0;
    for (int i = 0; i <= d; ++i) {
      size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    }
    const double spread = values[worst] - values[best];
    const double x_scale = 1.0 + simplex[best].cwiseAbs().maxCoeff();
    if (std::isfinite(values[best]) && spread <= options.f_tol &&
        size <= options.x_tol * x_scale) {
      converged = true;
      break;
    }
    if (evals >= options.max_evaluations) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= d;

    const Eigen::VectorXd reflected =
        centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded =
          centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 0; i <= d; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const int best = static_cast<int>(
      std::min_element(values.begin(), values.end()) - values.begin());
  NelderMeadResult out;
  out.x = simplex[best];
  out.value = values[best];
  out.evaluations = evals;
  out.converged = converged;
  return out;
}

}  // namespace fedlmm
