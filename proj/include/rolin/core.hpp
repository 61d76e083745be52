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

// Robust linear classification: an ordinary loss fit restricted to the top-k
// principal directions of the signed data, plus a bounded component in the
// orthogonal complement whose direction has a closed form.

#include <cstddef>
#include <optional>
#include <span>

#include "rolin/data.hpp"
#include "rolin/linalg.hpp"
#include "rolin/losses.hpp"
#include "rolin/model.hpp"
#include "rolin/solver.hpp"

namespace rolin {

/// Training data after optional standardization, with everything about it
/// that does not depend on the hyperparameters other than `normalize`.
struct PreparedData {
  std::optional<FeatureScaling> scaling;
  /// Signed rows y_i * x~_i.
  Matrix z;
  Vector labels;
  SubspaceDecomposition svd;
  /// n x r; row i holds the coordinates V^T z_i in the singular basis.
  Matrix coordinates;
  /// Z^T 1
  Vector signed_sum;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t rank() const noexcept { return svd.rank(); }
};

PreparedData prepare(const LabeledDataset& data, bool normalize);

/// Intercept and weights of the loss fit restricted to S0.
struct SubspaceFit {
  double intercept = 0.0;
  /// beta_S0 = V_S0 gamma, length p.
  Vector weights;
  /// gamma, coordinates in the S0 basis.
  Vector coordinates;
  bool hit_norm_cap = false;
};

/// Minimizes the mean loss of intercept * y_i + gamma . (V_S0^T z_i) (plus
/// the stability ridge). k = 0 gives an intercept-only fit.
SubspaceFit fit_subspace_classifier(const Matrix& z, std::span<const double> labels,
                                    const BasisView& s0, LossKind loss, const SolverConfig& cfg);
/// Same fit using the precomputed coordinates of `data` (first k of them).
SubspaceFit fit_subspace_classifier(const PreparedData& data, std::size_t k, LossKind loss,
                                    const SolverConfig& cfg);

/// The loss-independent part of the robust component.
struct RobustComponent {
  /// Mean of V_Sot^T z_i, length r - k.
  Vector mu;
  /// V_Sot (D_Sot^2 + sigma_bound I)^{-1} V_Sot^T Z^T 1, length p.
  Vector nu;
  /// nu / ||nu||, or zero when nu vanishes.
  Vector eta;
  /// Norm of the robust component, set by fit_magnitude.
  double magnitude = 0.0;
  /// sigma_ratio * max(D_Sot^2); 0 when the complement is empty.
  ///
  /// The smoothed covariance diag(D_Sot^2 + sigma_bound) is n times the
  /// per-sample form diag(D_Sot^2 / n + sigma_bound / n), so eta is also the
  /// direction of ridge regression of 1 on the projected rows with penalty
  /// n * (sigma_bound / n) = sigma_bound.
  double sigma_bound = 0.0;

  bool is_zero() const noexcept;
};

/// Direction of the robust component for the split stored in `decomposition`.
/// Throws NumericalError when D_Sot^2 + sigma_bound has a zero entry.
RobustComponent robust_direction(const Matrix& z, const SubspaceDecomposition& decomposition,
                                 double sigma_ratio);
RobustComponent robust_direction(std::span<const double> signed_sum, std::size_t sample_count,
                                 const SubspaceDecomposition& decomposition, double sigma_ratio);

/// 1e-6 * max(1, b_max)
double magnitude_tolerance(double b_max) noexcept;

/// argmin over c in [0, b_max] of the mean loss of
/// intercept * y_i + (beta_s0 + c * eta) . z_i.
double fit_magnitude(const Matrix& z, std::span<const double> labels, double intercept,
                     std::span<const double> beta_s0, std::span<const double> eta, double b_max,
                     LossKind loss, double tolerance);

/// Full fit for one hyperparameter setting. With psi.normalize the
/// standardization is learned on `data` and stored in the model.
LinearModel calc_beta(const LabeledDataset& data, const HyperParams& psi, LossKind loss,
                      const SolverConfig& cfg);
/// Same, on data already prepared with psi.normalize.
LinearModel calc_beta(const PreparedData& data, const HyperParams& psi, LossKind loss,
                      const SolverConfig& cfg);
/// The part of calc_beta after the S0 fit; lets callers reuse one S0 fit
/// across sigma_ratio and b_max values.
LinearModel complete_model(const PreparedData& data, const SubspaceFit& s0_fit,
                           const HyperParams& psi, LossKind loss,
                           RobustComponent* component_out = nullptr);

}  // namespace rolin
