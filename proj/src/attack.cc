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

#include "fedlmm/attack.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "fedlmm/errors.h"
#include "fedlmm/privacy.h"

namespace fedlmm {
namespace {

using Clock = std::chrono::steady_clock;

void ValidateInstance(const FeasibilityInstance& inst, const AttackConfig& cfg) {
  const Eigen::MatrixXi& g = inst.gram;
  if (g.rows() < 1 || g.rows() != g.cols()) {
    throw ValidationError("gram must be a non-empty square matrix");
  }
  if (g.rows() > cfg.p_max) {
    std::ostringstream os;
    os << "p=" << g.rows() << " exceeds the pattern-enumeration capacity p_max="
       << cfg.p_max;
    throw ValidationError(os.str());
  }
  if (inst.n < 0) throw ValidationError("row count must be nonnegative");
  if (g != g.transpose()) throw ValidationError("gram must be symmetric");
}

// Branch-and-bound over row-pattern counts. Upper-triangle entries of the
// Gram matrix are flattened to `residual_`; pattern r covers entry (j, k)
// when bits j and k are both set.
class PatternSearch {
 public:
  PatternSearch(const FeasibilityInstance& inst, const AttackConfig& cfg)
      : p_(static_cast<int>(inst.gram.rows())),
        n_(inst.n),
        deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(
                                         cfg.timeout_seconds))) {
    entry_.assign(static_cast<size_t>(p_) * p_, -1);
    for (int j = 0; j < p_; ++j) {
      for (int k = j; k < p_; ++k) {
        entry_[j * p_ + k] = static_cast<int>(target_.size());
        target_.push_back(inst.gram(j, k));
      }
      diag_.push_back(entry_[j * p_ + j]);
    }
    const std::uint32_t count = 1u << p_;
    for (std::uint32_t m = 0; m < count; ++m) masks_.push_back(m);
    std::stable_sort(masks_.begin(), masks_.end(),
                     [](std::uint32_t a, std::uint32_t b) {
                       return std::popcount(a) > std::popcount(b);
                     });
    for (std::uint32_t m : masks_) {
      std::vector<int> cover;
      for (int j = 0; j < p_; ++j) {
        if (!(m >> j & 1u)) continue;
        for (int k = j; k < p_; ++k) {
          if (m >> k & 1u) cover.push_back(entry_[j * p_ + k]);
        }
      }
      cover_.push_back(std::move(cover));
      popcount_.push_back(std::popcount(m));
    }
    counts_.assign(masks_.size(), 0);
  }

  // Returns the number of solutions found (<= limit); the first is kept.
  std::int64_t FindFeasible(std::int64_t limit) {
    limit_ = limit;
    found_ = 0;
    residual_ = target_;
    if (std::any_of(residual_.begin(), residual_.end(),
                    [](std::int64_t v) { return v < 0; })) {
      return 0;
    }
    FeasibleDfs(0, n_);
    return found_;
  }

  // Minimum-L1 repair; returns the best violation found.
  std::int64_t Repair() {
    residual_ = target_;
    std::fill(counts_.begin(), counts_.end(), 0);
    Greedy();
    RepairDfs(0, n_);
    return best_cost_;
  }

  bool timed_out() const { return timed_out_; }
  bool has_solution() const { return !solution_.empty(); }

  BinaryMatrix SolutionMatrix() const {
    BinaryMatrix x = BinaryMatrix::Zero(n_, p_);
    int row = 0;
    for (size_t r = 0; r < masks_.size(); ++r) {
      for (int c = 0; c < solution_[r]; ++c, ++row) {
        for (int j = 0; j < p_; ++j) x(row, j) = (masks_[r] >> j) & 1u;
      }
    }
    return x;
  }

 private:
  bool Tick() {
    if ((++nodes_ & 1023u) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
    }
    return timed_out_;
  }

  void Apply(size_t r, int c) {
    for (int e : cover_[r]) residual_[e] -= c;
  }

  std::int64_t AbsResidual() const {
    std::int64_t s = 0;
    for (std::int64_t v : residual_) s += v < 0 ? -v : v;
    return s;
  }

  void FeasibleDfs(size_t idx, int m) {
    if (Tick() || found_ >= limit_) return;
    if (m == 0 || masks_[idx] == 0) {
      // Whatever rows remain take the all-zero pattern.
      if (std::all_of(residual_.begin(), residual_.end(),
                      [](std::int64_t v) { return v == 0; })) {
        if (found_ == 0) {
          solution_ = counts_;
          solution_.back() += m;
        }
        ++found_;
      }
      return;
    }
    // Each remaining row adds at most 1 to any diagonal entry and at most
    // popcount(idx) to the diagonal total; off-diagonals cannot exceed the
    // diagonals they share.
    std::int64_t diag_total = 0;
    for (int j = 0; j < p_; ++j) {
      const std::int64_t d = residual_[diag_[j]];
      if (d > m) return;
      diag_total += d;
      for (int k = j + 1; k < p_; ++k) {
        const std::int64_t o = residual_[entry_[j * p_ + k]];
        if (o > d || o > residual_[diag_[k]]) return;
      }
    }
    if (diag_total > static_cast<std::int64_t>(m) * popcount_[idx]) return;

    std::int64_t max_c = m;
    for (int e : cover_[idx]) max_c = std::min(max_c, residual_[e]);
    for (std::int64_t c = max_c; c >= 0; --c) {
      Apply(idx, static_cast<int>(c));
      counts_[idx] = static_cast<int>(c);
      FeasibleDfs(idx + 1, m - static_cast<int>(c));
      counts_[idx] = 0;
      Apply(idx, -static_cast<int>(c));
      if (timed_out_ || found_ >= limit_) return;
    }
  }

  // Takes as many copies of each pattern as the positive residual allows.
  void Greedy() {
    int m = n_;
    std::vector<int> counts(masks_.size(), 0);
    for (size_t r = 0; r + 1 < masks_.size() && m > 0; ++r) {
      std::int64_t c = m;
      for (int e : cover_[r]) c = std::min(c, residual_[e]);
      if (c <= 0) continue;
      counts[r] = static_cast<int>(c);
      Apply(r, static_cast<int>(c));
      m -= static_cast<int>(c);
    }
    counts.back() += m;
    best_cost_ = AbsResidual();
    solution_ = counts;
    for (size_t r = 0; r < masks_.size(); ++r) Apply(r, -counts[r]);
  }

  std::int64_t LowerBound(int m, int max_popcount) const {
    std::int64_t negative = 0;
    for (std::int64_t v : residual_) {
      if (v < 0) negative -= v;
    }
    std::int64_t per_entry = 0, diag_pos = 0;
    for (int j = 0; j < p_; ++j) {
      const std::int64_t d = residual_[diag_[j]];
      if (d > 0) diag_pos += d;
      if (d > m) per_entry += d - m;
    }
    const std::int64_t total =
        std::max<std::int64_t>(0, diag_pos - static_cast<std::int64_t>(m) *
                                                 max_popcount);
    return negative + std::max(per_entry, total);
  }

  void RepairDfs(size_t idx, int m) {
    if (Tick() || best_cost_ == 0) return;
    if (m == 0 || masks_[idx] == 0) {
      const std::int64_t cost = AbsResidual();
      if (cost < best_cost_) {
        best_cost_ = cost;
        solution_ = counts_;
        solution_.back() += m;
      }
      return;
    }
    if (LowerBound(m, popcount_[idx]) >= best_cost_) return;

    std::int64_t fit = m;
    for (int e : cover_[idx]) fit = std::min(fit, residual_[e]);
    const int preferred = static_cast<int>(std::clamp<std::int64_t>(fit, 0, m));
    // Preferred count first, then walk outward.
    for (int step = 0; step <= m; ++step) {
      int c;
      if (step <= preferred) {
        c = preferred - step;
      } else {
        c = step;
      }
      Apply(idx, c);
      counts_[idx] = c;
      RepairDfs(idx + 1, m - c);
      counts_[idx] = 0;
      Apply(idx, -c);
      if (timed_out_ || best_cost_ == 0) return;
    }
  }

  int p_;
  int n_;
  Clock::time_point deadline_;
  std::vector<int> entry_;
  std::vector<int> diag_;
  std::vector<std::int64_t> target_;
  std::vector<std::uint32_t> masks_;
  std::vector<std::vector<int>> cover_;
  std::vector<int> popcount_;

  std::vector<std::int64_t> residual_;
  std::vector<int> counts_;
  std::vector<int> solution_;
  std::int64_t limit_ = 2;
  std::int64_t found_ = 0;
  std::int64_t best_cost_ = std::numeric_limits<std::int64_t>::max();
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
};

std::int64_t Violation(const FeasibilityInstance& inst, const BinaryMatrix& x) {
  const Eigen::MatrixXi g = x.transpose() * x;
  std::int64_t v = 0;
  for (int j = 0; j < g.rows(); ++j) {
    for (int k = j; k < g.cols(); ++k) {
      v += std::abs(static_cast<std::int64_t>(inst.gram(j, k)) - g(j, k));
    }
  }
  return v;
}

std::vector<std::vector<int>> SortedRows(const BinaryMatrix& m) {
  std::vector<std::vector<int>> rows(m.rows(), std::vector<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

const char* AttackStatusName(AttackStatus s) {
  switch (s) {
    case AttackStatus::kUnique:
      return "unique";
    case AttackStatus::kFeasibleMultiple:
      return "feasible-multiple";
    case AttackStatus::kInfeasibleRepaired:
      return "infeasible-repaired";
    case AttackStatus::kFailed:
      return "failed";
  }
  return "?";
}

AttackResult Reconstruct(const FeasibilityInstance& instance,
                         const AttackConfig& config) {
  ValidateInstance(instance, config);
  AttackResult out;
  PatternSearch search(instance, config);
  const std::int64_t found = search.FindFeasible(2);
  if (found > 0) {
    out.x_hat = search.SolutionMatrix();
    out.violation = 0;
    if (search.timed_out()) {
      out.status = AttackStatus::kFailed;
    } else {
      out.status = found == 1 ? AttackStatus::kUnique
                              : AttackStatus::kFeasibleMultiple;
    }
    return out;
  }
  if (search.timed_out()) {
    out.status = AttackStatus::kFailed;
    return out;
  }
  search.Repair();
  out.x_hat = search.SolutionMatrix();
  out.violation = Violation(instance, *out.x_hat);
  out.status = search.timed_out() ? AttackStatus::kFailed
                                  : AttackStatus::kInfeasibleRepaired;
  return out;
}

std::int64_t CountFeasible(const FeasibilityInstance& instance,
                           std::int64_t limit, const AttackConfig& config) {
  ValidateInstance(instance, config);
  PatternSearch search(instance, config);
  const std::int64_t found = search.FindFeasible(limit);
  return search.timed_out() ? -1 : found;
}

Eigen::MatrixXi RoundGram(const Eigen::MatrixXd& noisy, int n, bool clamp) {
  const int p = static_cast<int>(noisy.rows());
  Eigen::MatrixXi g(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = j; k < p; ++k) {
      g(j, k) = static_cast<int>(std::lround(noisy(j, k)));
      g(k, j) = g(j, k);
    }
  }
  if (!clamp) return g;
  for (int j = 0; j < p; ++j) g(j, j) = std::clamp(g(j, j), 0, n);
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      g(j, k) = std::clamp(g(j, k), 0, std::min(g(j, j), g(k, k)));
      g(k, j) = g(j, k);
    }
  }
  return g;
}

int HammingSorted(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("Hamming distance needs equally shaped matrices");
  }
  const auto ra = SortedRows(a);
  const auto rb = SortedRows(b);
  int d = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    for (size_t j = 0; j < ra[i].size(); ++j) d += ra[i][j] != rb[i][j];
  }
  return d;
}

AttackResult AttackPipeline(const BinaryMatrix& true_x,
                            const std::optional<PrivacyBudget>& budget,
                            std::uint64_t seed, const AttackConfig& config) {
  if ((true_x.array() != 0 && true_x.array() != 1).any()) {
    throw ValidationError("attack target must be a 0/1 matrix");
  }
  const int n = static_cast<int>(true_x.rows());
  const int p = static_cast<int>(true_x.cols());
  if (p > config.p_max) {
    throw ValidationError("p exceeds the pattern-enumeration capacity");
  }
  Eigen::MatrixXd gram = (true_x.transpose() * true_x).cast<double>();
  if (budget) {
    budget->Validate();
    Rng rng(MixSeed(seed, "gram-release"));
    AddSymmetricGaussianNoise(gram, budget->sigma_dp, rng,
                              PrivatizationScope::Full());
  }
  FeasibilityInstance inst{RoundGram(gram, n, config.clamp), n};
  AttackResult out = Reconstruct(inst, config);
  if (out.x_hat) {
    out.hamming = HammingSorted(*out.x_hat, true_x);
    const bool solves_release = out.status == AttackStatus::kUnique ||
                                out.status == AttackStatus::kFeasibleMultiple;
    out.matrix_rate = (solves_release && out.hamming == 0) ? 1 : 0;
    out.element_rate =
        n * p == 0 ? 1.0 : 1.0 - static_cast<double>(out.hamming) / (n * p);
  } else {
    out.matrix_rate = 0;
    out.element_rate = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace fedlmm
