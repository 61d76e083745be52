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

// The competitors RoLin is compared against: L1- and L2-regularized loss
// minimization and a fit restricted to the top principal components, each
// tuned by ordinary cross-validation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rolin/data.hpp"
#include "rolin/losses.hpp"
#include "rolin/model.hpp"
#include "rolin/solver.hpp"

namespace rolin {

/// 8 log-spaced values from 1e-4 to 1e2.
std::vector<double> default_lambda_grid();

/// Largest k tried by default for top_pcs.
inline constexpr std::size_t kDefaultTopPcsLimit = 30;

struct BaselineConfig {
  /// l1, l2 or top_pcs.
  Method method = Method::l2;
  std::vector<double> lambda_grid = default_lambda_grid();
  /// Empty means 1..min(smallest training-fold rank, kDefaultTopPcsLimit).
  std::vector<std::size_t> k_grid;
  std::vector<bool> normalize_options{false, true};
  std::size_t fold_count = 5;
  std::size_t instance_count = 5;
  std::uint64_t seed = 0;
  /// Holdout loss; unset means the fitted loss.
  std::optional<LossKind> cv_objective;
  std::size_t threads = 1;

  void validate() const;
};

/// Minimizes mean loss + lambda * ||w||_1 (q = 1) or lambda * ||w||_2^2
/// (q = 2). The intercept is not penalized.
LinearModel fit_regularized(const LabeledDataset& data, LossKind loss, int q, double lambda,
                            bool normalize, const SolverConfig& cfg);

/// Loss fit restricted to the span of the top k right singular vectors of
/// the signed data. Requires 1 <= k <= rank.
LinearModel fit_top_pcs(const LabeledDataset& data, LossKind loss, std::size_t k, bool normalize,
                        const SolverConfig& cfg);

struct BaselineCandidate {
  /// Penalty (l1/l2) or 0.
  double lambda = 0.0;
  /// Component count (top_pcs) or 0.
  std::size_t k = 0;
  bool normalize = false;
  double holdout_mean = 0.0;
};

struct BaselineCVResult {
  std::vector<BaselineCandidate> candidates;
  std::size_t chosen = 0;
};

/// Picks the grid value with the lowest mean holdout loss over the splits
/// (earliest on ties: smaller lambda or k, then normalize=false) and refits
/// it on all of `data`.
LinearModel cross_validate_baseline(const LabeledDataset& data, LossKind loss,
                                    const BaselineConfig& config, const SolverConfig& cfg,
                                    BaselineCVResult* selection = nullptr);

}  // namespace rolin
