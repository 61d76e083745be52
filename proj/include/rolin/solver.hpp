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
#include <functional>
#include <span>

#include "rolin/losses.hpp"
#include "rolin/matrix.hpp"

namespace rolin {

struct SolverConfig {
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  /// Coefficient of the ridge term stability_ridge * ||w||^2 added to every
  /// otherwise unpenalized empirical-risk fit.
  double stability_ridge = 1e-8;
  /// The subspace fit also adds (subspace_ridge_scale / n) * ||(b0, w)||^2,
  /// the mean-loss form of the usual 0.5 * ||beta||^2 + C * sum(loss) with
  /// C = 1 and the intercept treated as a weight. Without it, folds that
  /// are separable in the top components yield near-infinite weights and
  /// the holdout/training ratio guard rejects every k. 0 disables it.
  double subspace_ridge_scale = 0.5;
  /// Iterates are projected back onto this Euclidean ball.
  double norm_cap = 1e4;

  void validate() const;
};

/// Returns f(w) and writes the gradient (or a subgradient) into `grad`.
using Objective = std::function<double(std::span<const double> w, std::span<double> grad)>;

/// Like Objective; also writes the (generalized) Hessian, row-major d x d,
/// when `hessian` is not null.
using SecondOrderObjective =
    std::function<double(std::span<const double> w, std::span<double> grad, Matrix* hessian)>;

struct SolverResult {
  Vector point;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool hit_norm_cap = false;
};

/// Gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking. `metric` is an optional positive diagonal preconditioner
/// (search direction -grad / metric). Monotone: the returned value never
/// exceeds f(start). Throws NumericalError if f or its gradient stops being
/// finite.
SolverResult minimize_smooth(const Objective& f, Vector start, const SolverConfig& cfg,
                             std::span<const double> metric = {});

/// Damped Newton with Armijo backtracking. Indefinite or singular Hessians
/// get Levenberg damping. Monotone like minimize_smooth.
SolverResult minimize_newton(const SecondOrderObjective& f, Vector start, const SolverConfig& cfg);

/// Above this many parameters fit_margin_objective uses first-order steps
/// instead of Newton.
inline constexpr std::size_t kNewtonMaxDimension = 400;

/// Subgradient method for nonsmooth convex objectives (hinge loss). Runs
/// epochs of constant normalized steps, halving the step each epoch and
/// restarting from the best iterate; returns the best point seen.
SolverResult minimize_subgradient(const Objective& f, Vector start, const SolverConfig& cfg,
                                  std::span<const double> metric = {});

/// Golden-section search for a convex f on [0, c_max]. The result is within
/// `tolerance` of a minimizer. Endpoints are preferred when they are no worse
/// than the interior estimate, with 0 first. Throws InvalidArgument when
/// c_max < 0 or tolerance <= 0.
double minimize_1d_bounded(const std::function<double(double)>& f, double c_max,
                           double tolerance);

/// Proximal gradient (soft thresholding) for loss_part(w) + lambda * sum_{j >=
/// unpenalized} |w_j|, starting from zero. The leading `unpenalized`
/// coordinates (the intercept) are never thresholded. The composite
/// objective decreases monotonically.
SolverResult minimize_l1_regularized(const Objective& loss_part, double lambda,
                                     std::size_t dimension, const SolverConfig& cfg,
                                     std::size_t unpenalized,
                                     std::span<const double> metric = {});

/// Proximal Newton for the same problem with a twice-differentiable loss
/// part: each step minimizes the local quadratic model plus the L1 term by
/// coordinate descent, followed by a backtracking line search on the
/// composite objective.
SolverResult minimize_l1_newton(const SecondOrderObjective& loss_part, double lambda,
                                std::size_t dimension, const SolverConfig& cfg,
                                std::size_t unpenalized);

/// Mean margin loss of a linear predictor plus quadratic penalties:
///
///   (1/n) sum_i loss(features_i . w) + ridge * ||w||^2
///                                     + l2 * sum_{j >= unpenalized} w_j^2
///
/// Row i of `features` holds the signed inputs for sample i, so that
/// features_i . w is the margin.
class MarginObjective {
 public:
  MarginObjective(const Matrix& features, LossKind kind, double ridge, double l2 = 0.0,
                  std::size_t unpenalized = 1);
  // Holds a reference to the features.
  MarginObjective(Matrix&&, LossKind, double, double = 0.0, std::size_t = 1) = delete;

  double operator()(std::span<const double> w, std::span<double> grad) const {
    return evaluate(w, grad, nullptr);
  }
  /// Value, gradient and, when `hessian` is set, the generalized Hessian.
  double evaluate(std::span<const double> w, std::span<double> grad, Matrix* hessian) const;
  /// Mean loss without penalties.
  double mean_loss(std::span<const double> w) const;
  /// Diagonal of the quadratic part: mean squared feature plus penalties.
  Vector diagonal_metric() const;

  std::size_t dimension() const noexcept { return features_.cols(); }

 private:
  const Matrix& features_;
  LossKind kind_;
  double ridge_;
  double l2_;
  std::size_t unpenalized_;
};

/// Fits w minimizing the objective with the method appropriate for its loss
/// (Newton, or gradient descent above kNewtonMaxDimension, for smooth
/// losses; subgradients for hinge).
SolverResult fit_margin_objective(const MarginObjective& objective, LossKind kind,
                                  const SolverConfig& cfg);

}  // namespace rolin
