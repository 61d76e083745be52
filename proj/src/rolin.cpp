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

#include <cmath>
#include <string>

#include "rolin/core.hpp"
#include "rolin/error.hpp"
#include "rolin/kernels.hpp"

namespace rolin {
namespace {

Vector column_sums(const Matrix& z) {
  Vector ones(z.rows(), 1.0);
  return multiply_transposed(z, ones);
}

// Row i: [y_i, c_i0, ..., c_i(k-1)] where c_i are the subspace coordinates.
Matrix subspace_features(std::span<const double> labels, const Matrix& coordinates,
                         std::size_t k) {
  const std::size_t n = labels.size();
  Matrix f(n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    f(i, 0) = labels[i];
    for (std::size_t j = 0; j < k; ++j) f(i, j + 1) = coordinates(i, j);
  }
  return f;
}

SubspaceFit solve_subspace_fit(const Matrix& features, const BasisView& s0, LossKind loss,
                               const SolverConfig& cfg) {
  const double ridge =
      cfg.stability_ridge + cfg.subspace_ridge_scale / static_cast<double>(features.rows());
  const MarginObjective objective(features, loss, ridge);
  const SolverResult solved = fit_margin_objective(objective, loss, cfg);
  SubspaceFit fit;
  fit.intercept = solved.point[0];
  fit.coordinates.assign(solved.point.begin() + 1, solved.point.end());
  fit.weights = lift(s0, fit.coordinates);
  fit.hit_norm_cap = solved.hit_norm_cap;
  return fit;
}

}  // namespace

PreparedData prepare(const LabeledDataset& data, bool normalize) {
  data.validate();
  if (data.size() == 0) throw InvalidArgument("cannot fit on an empty dataset");
  PreparedData out;
  out.labels = data.labels;
  if (normalize) {
    out.scaling = FeatureScaling::fit(data.features);
    out.z = signed_matrix(out.scaling->apply(data.features), data.labels);
  } else {
    out.z = signed_matrix(data.features, data.labels);
  }
  out.svd = thin_svd(out.z);
  const BasisView basis = out.svd.basis();
  out.coordinates = Matrix(out.z.rows(), basis.count);
  for (std::size_t i = 0; i < out.z.rows(); ++i) {
    const Vector c = project(basis, out.z.row(i));
    auto dst = out.coordinates.row(i);
    for (std::size_t j = 0; j < c.size(); ++j) dst[j] = c[j];
  }
  out.signed_sum = column_sums(out.z);
  return out;
}

SubspaceFit fit_subspace_classifier(const Matrix& z, std::span<const double> labels,
                                    const BasisView& s0, LossKind loss, const SolverConfig& cfg) {
  require_fittable(loss);
  if (z.rows() != labels.size()) throw InvalidArgument("fit_subspace_classifier: label count mismatch");
  if (z.rows() == 0) throw InvalidArgument("fit_subspace_classifier: no samples");
  Matrix coordinates(z.rows(), s0.count);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const Vector c = project(s0, z.row(i));
    for (std::size_t j = 0; j < c.size(); ++j) coordinates(i, j) = c[j];
  }
  return solve_subspace_fit(subspace_features(labels, coordinates, s0.count), s0, loss, cfg);
}

SubspaceFit fit_subspace_classifier(const PreparedData& data, std::size_t k, LossKind loss,
                                    const SolverConfig& cfg) {
  require_fittable(loss);
  if (k > data.rank()) {
    throw InvalidArgument("k=" + std::to_string(k) + " exceeds the numerical rank " +
                          std::to_string(data.rank()) + " of the training data");
  }
  const SubspaceDecomposition split = data.svd.with_split(k);
  return solve_subspace_fit(subspace_features(data.labels, data.coordinates, k), split.s0(), loss,
                            cfg);
}

bool RobustComponent::is_zero() const noexcept {
  for (double v : eta) {
    if (v != 0.0) return false;
  }
  return true;
}

RobustComponent robust_direction(std::span<const double> signed_sum, std::size_t sample_count,
                                 const SubspaceDecomposition& decomposition, double sigma_ratio) {
  if (!(sigma_ratio >= 0.0) || !std::isfinite(sigma_ratio)) {
    throw InvalidArgument("robust_direction: sigma_ratio must be finite and >= 0");
  }
  if (sample_count == 0) throw InvalidArgument("robust_direction: no samples");
  const BasisView complement = decomposition.complement();
  const auto values = decomposition.complement_values();

  RobustComponent out;
  out.nu.assign(decomposition.dimension(), 0.0);
  out.eta.assign(decomposition.dimension(), 0.0);
  if (complement.count == 0) return out;

  // Values are descending, so the first complement value is the largest.
  out.sigma_bound = sigma_ratio * values[0] * values[0];

  const Vector projected_sum = project(complement, signed_sum);
  const double n = static_cast<double>(sample_count);
  out.mu.resize(projected_sum.size());
  Vector scaled(projected_sum.size());
  for (std::size_t j = 0; j < projected_sum.size(); ++j) {
    out.mu[j] = projected_sum[j] / n;
    const double denom = values[j] * values[j] + out.sigma_bound;
    if (denom == 0.0) {
      throw NumericalError("robust_direction: smoothed covariance is singular (sigma_ratio = 0 "
                           "with a zero singular value)");
    }
    scaled[j] = projected_sum[j] / denom;
  }
  out.nu = lift(complement, scaled);

  const double nu_norm = kernels::norm(out.nu);
  const double threshold = 1e-12 * kernels::norm(signed_sum) / n;
  if (nu_norm > threshold) {
    for (std::size_t c = 0; c < out.nu.size(); ++c) out.eta[c] = out.nu[c] / nu_norm;
  }
  return out;
}

RobustComponent robust_direction(const Matrix& z, const SubspaceDecomposition& decomposition,
                                 double sigma_ratio) {
  if (z.cols() != decomposition.dimension()) {
    throw InvalidArgument("robust_direction: matrix and decomposition dimensions differ");
  }
  return robust_direction(column_sums(z), z.rows(), decomposition, sigma_ratio);
}

double magnitude_tolerance(double b_max) noexcept { return 1e-6 * std::max(1.0, b_max); }

double fit_magnitude(const Matrix& z, std::span<const double> labels, double intercept,
                     std::span<const double> beta_s0, std::span<const double> eta, double b_max,
                     LossKind loss, double tolerance) {
  require_fittable(loss);
  if (!(b_max >= 0.0)) throw InvalidArgument("fit_magnitude: b_max must be >= 0");
  if (z.rows() != labels.size()) throw InvalidArgument("fit_magnitude: label count mismatch");
  if (b_max == 0.0) return 0.0;

  Vector base = multiply(z, beta_s0);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] += intercept * labels[i];
  const Vector slope = multiply(z, eta);
  Vector margins(base.size());
  const double inv_n = 1.0 / static_cast<double>(base.size());
  const auto objective = [&](double c) {
    for (std::size_t i = 0; i < margins.size(); ++i) margins[i] = base[i] + c * slope[i];
    return kernels::loss_sum(loss, margins) * inv_n;
  };
  return minimize_1d_bounded(objective, b_max, tolerance);
}

LinearModel complete_model(const PreparedData& data, const SubspaceFit& s0_fit,
                           const HyperParams& psi, LossKind loss,
                           RobustComponent* component_out) {
  psi.validate();
  const SubspaceDecomposition split = data.svd.with_split(psi.k);
  RobustComponent component =
      robust_direction(data.signed_sum, data.size(), split, psi.sigma_ratio);
  if (!component.is_zero()) {
    component.magnitude = fit_magnitude(data.z, data.labels, s0_fit.intercept, s0_fit.weights,
                                        component.eta, psi.b_max, loss,
                                        magnitude_tolerance(psi.b_max));
  }

  LinearModel model;
  model.intercept = s0_fit.intercept;
  model.weights = s0_fit.weights;
  if (component.magnitude != 0.0) {
    kernels::axpy(component.magnitude, component.eta, model.weights);
  }
  model.loss_kind = loss;
  model.normalization = data.scaling;
  model.fitted_hyperparams = psi;
  model.method = Method::rolin;
  if (component_out != nullptr) *component_out = std::move(component);
  return model;
}

LinearModel calc_beta(const PreparedData& data, const HyperParams& psi, LossKind loss,
                      const SolverConfig& cfg) {
  psi.validate();
  if (psi.normalize != data.scaling.has_value()) {
    throw InvalidArgument("calc_beta: prepared data does not match psi.normalize");
  }
  const SubspaceFit s0_fit = fit_subspace_classifier(data, psi.k, loss, cfg);
  return complete_model(data, s0_fit, psi, loss);
}

LinearModel calc_beta(const LabeledDataset& data, const HyperParams& psi, LossKind loss,
                      const SolverConfig& cfg) {
  psi.validate();
  require_fittable(loss);
  LinearModel model = calc_beta(prepare(data, psi.normalize), psi, loss, cfg);
  model.feature_names = data.feature_names;
  model.label_column = data.label_column;
  model.positive_label = data.positive_label;
  model.negative_label = data.negative_label;
  return model;
}

}  // namespace rolin
