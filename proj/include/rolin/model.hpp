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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rolin/losses.hpp"
#include "rolin/matrix.hpp"

namespace rolin {

/// Hyperparameters searched by RobustCV: dimension of the trusted subspace,
/// the sigma ratio of the smoothed covariance, the cap on the robust
/// component's norm and whether features are standardized first.
struct HyperParams {
  std::size_t k = 0;
  double sigma_ratio = 0.0;
  double b_max = 0.0;
  bool normalize = false;

  /// Throws InvalidArgument when a field is negative or not finite.
  void validate() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Canonical candidate order: k, then sigma_ratio, then b_max, then
/// normalize=false before true.
bool canonical_less(const HyperParams& a, const HyperParams& b) noexcept;

/// Per-feature standardization learned on training data. Features with zero
/// variance keep scale 1.
struct FeatureScaling {
  Vector mean;
  Vector scale;

  static FeatureScaling fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
  void apply_in_place(std::span<double> row) const;
  std::size_t size() const noexcept { return mean.size(); }

  friend bool operator==(const FeatureScaling&, const FeatureScaling&) = default;
};

/// Which procedure produced a model. Serialized as "rolin", "l1", "l2", "top_pcs".
enum class Method { rolin, l1, l2, top_pcs };

std::string_view to_string(Method method) noexcept;
Method method_from_string(std::string_view name);

/// A fitted linear classifier g(x) = intercept + weights . x~, where x~ is x
/// after the stored standardization (identity when absent).
struct LinearModel {
  double intercept = 0.0;
  Vector weights;
  LossKind loss_kind = LossKind::logistic;
  std::optional<FeatureScaling> normalization;
  HyperParams fitted_hyperparams;

  Method method = Method::rolin;
  /// Penalty strength for the l1/l2 baselines; 0 otherwise.
  double lambda = 0.0;
  std::vector<std::string> feature_names;
  // Label provenance from load_csv; lets `predict` report original labels.
  std::string label_column;
  std::string positive_label;
  std::string negative_label;

  std::size_t dimension() const noexcept { return weights.size(); }
  double score(std::span<const double> x) const;
  Vector scores(const Matrix& x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

}  // namespace rolin
