// Copyright 2026 The RoLin Authors
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

#pragma once

// Robust cross-validation: selects (k, sigma_ratio, b_max, normalize) while
// guarding against overconfident candidates with three signals: the
// holdout/training loss ratio, the gap between average and worst holdout
// loss, and a preference for solutions that use only the top components.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rolin/data.hpp"
#include "rolin/losses.hpp"
#include "rolin/model.hpp"
#include "rolin/solver.hpp"

namespace rolin {

enum class Selection {
  /// Ratio guard, slack rule and gain rule.
  robust,
  /// Standard CV: lowest mean holdout loss over the whole grid.
  plain,
};

struct CVConfig {
  double theta_ratio = 5.0;
  double theta_slack = 0.1;
  double theta_gain = 0.05;
  std::size_t fold_count = 5;
  std::size_t instance_count = 5;
  std::vector<double> sigma_grid{1.0, 2.15, 4.64, 10.0};
  /// b_max values for n = 15 training samples.
  std::vector<double> bmax_grid{0.01, 0.0215, 0.0464, 0.1};
  /// Multiply the b_max grid by sqrt(n / 15).
  bool scale_bmax_with_n = true;
  /// Loss used for holdout/training scores; unset means the fitted loss.
  /// zero_one gives the double-loss mode.
  std::optional<LossKind> cv_objective;
  std::vector<bool> normalize_options{false, true};
  Selection selection = Selection::robust;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
  LossKind objective_for(LossKind fitted) const noexcept { return cv_objective.value_or(fitted); }
  std::vector<double> bmax_values(std::size_t n) const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
};

/// fold_count * instance_count splits. Each instance shuffles the indices
/// with its own derived seed and cuts them into folds whose sizes differ by
/// at most one (earlier folds take the remainder).
std::vector<Split> make_splits(std::size_t n, std::size_t fold_count, std::size_t instance_count,
                               std::uint64_t seed);

struct CandidateScore {
  HyperParams psi;
  double loss_avg = 0.0;
  double loss_max = 0.0;
  double loss_ratio = 0.0;
  double cost = 0.0;
};

/// holdout / training, with +inf when only the training loss is zero and 1
/// when both are.
double loss_ratio_term(double train_loss, double holdout_loss) noexcept;

/// Aggregates per-split losses: average and maximum holdout loss, mean
/// ratio, and cost = average if ratio <= theta_ratio else maximum.
CandidateScore score_from_losses(const HyperParams& psi, std::span<const double> train_losses,
                                 std::span<const double> holdout_losses, double theta_ratio);

/// Fits calc_beta on each split's training part and scores it.
CandidateScore calc_cost(const LabeledDataset& data, std::span<const Split> splits,
                         const HyperParams& psi, LossKind loss, LossKind cv_objective,
                         double theta_ratio, const SolverConfig& cfg);

/// Largest k such that ratio(m) <= theta_ratio for every m <= k, scanning
/// k = 1..k_cap and stopping at the first violation. Falls back to 1 when
/// k = 1 already fails. `stopped_at` receives the first violating k (0 when
/// none).
std::size_t max_reliable_pcs(const std::function<double(std::size_t)>& ratio_of,
                             std::size_t k_cap, double theta_ratio,
                             std::size_t* stopped_at = nullptr);

/// Index of the chosen candidate: among those with cost within (1 +
/// theta_slack) of the minimum, the one minimizing cost + loss_max. Ties go
/// to the earliest entry.
std::size_t robust_params_index(std::span<const CandidateScore> candidates, double theta_slack);
HyperParams robust_params(std::span<const CandidateScore> candidates, double theta_slack);

/// True when the general candidate should be kept, i.e. its cost beats the
/// top-components candidate by more than a factor (1 - theta_gain).
bool gain_rule_prefers_general(const CandidateScore& s0_robust, const CandidateScore& general,
                               double theta_gain) noexcept;

struct ReliablePcsTrace {
  bool normalize = false;
  /// Smallest training-fold rank (upper limit for k).
  std::size_t k_cap = 0;
  std::size_t k_max = 0;
  /// First k whose ratio exceeded the threshold; 0 when none did.
  std::size_t stopped_at = 0;
  /// Ratios for k = 1, 2, ... as far as the scan went.
  std::vector<double> ratios;
};

struct RobustCVDiagnostics {
  std::size_t split_count = 0;
  std::vector<double> bmax_values;
  std::vector<ReliablePcsTrace> reliable_pcs;
  /// Top-components candidates (k, 0, 0).
  std::vector<CandidateScore> s0_candidates;
  /// Full grid candidates.
  std::vector<CandidateScore> candidates;
  std::optional<CandidateScore> s0_robust;
  std::optional<CandidateScore> general_robust;
  HyperParams best;

  /// k_max for the given normalize setting.
  std::size_t k_max(bool normalize) const;
};

struct RobustCVResult {
  HyperParams best;
  RobustCVDiagnostics diagnostics;
};

RobustCVResult robust_cv(const LabeledDataset& data, LossKind loss, const CVConfig& config,
                         const SolverConfig& solver_cfg);

/// One row per candidate: set,k,sigma_ratio,b_max,normalize,loss_avg,
/// loss_max,loss_ratio,cost.
void write_diagnostics_csv(std::ostream& out, const RobustCVDiagnostics& diagnostics);

/// robust_cv followed by calc_beta on all of `data` with the selected
/// hyperparameters.
LinearModel fit_rolin(const LabeledDataset& data, LossKind loss, const CVConfig& config,
                      const SolverConfig& solver_cfg, RobustCVResult* selection = nullptr);

}  // namespace rolin
