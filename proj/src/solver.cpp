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

#include "rolin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rolin/error.hpp"
#include "rolin/kernels.hpp"

namespace rolin {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kMinStep = 1e-14;
constexpr double kMaxStep = 1e14;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector resolve_metric(std::span<const double> metric, std::size_t dimension) {
  if (metric.empty()) return Vector(dimension, 1.0);
  if (metric.size() != dimension) throw InvalidArgument("solver: metric has wrong length");
  Vector out(metric.begin(), metric.end());
  for (double& h : out) {
    if (!(h > 0.0) || !std::isfinite(h)) h = 1.0;
  }
  return out;
}

[[noreturn]] void non_finite(const char* who, std::size_t iteration, double value) {
  throw NumericalError(std::string(who) + ": non-finite objective or gradient at iteration " +
                       std::to_string(iteration) + " (objective " + std::to_string(value) + ")");
}

// Pulls x back onto the ball of radius cap; reports whether it had to.
bool cap_norm(std::span<double> x, double cap) {
  const double nrm = kernels::norm(x);
  if (nrm <= cap) return false;
  const double scale = cap / nrm;
  for (double& v : x) v *= scale;
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) throw InvalidArgument("SolverConfig: max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw InvalidArgument("SolverConfig: gradient_tolerance must be > 0");
  if (!(stability_ridge >= 0.0) || !std::isfinite(stability_ridge))
    throw InvalidArgument("SolverConfig: stability_ridge must be finite and >= 0");
  if (!(subspace_ridge_scale >= 0.0) || !std::isfinite(subspace_ridge_scale))
    throw InvalidArgument("SolverConfig: subspace_ridge_scale must be finite and >= 0");
  if (!(norm_cap > 0.0)) throw InvalidArgument("SolverConfig: norm_cap must be > 0");
}

SolverResult minimize_smooth(const Objective& f, Vector start, const SolverConfig& cfg,
                             std::span<const double> metric) {
  cfg.validate();
  const std::size_t d = start.size();
  const Vector h = resolve_metric(metric, d);

  SolverResult result;
  Vector x = std::move(start);
  Vector g(d), trial(d), trial_grad(d), dir(d);
  double fx = f(x, g);
  if (!std::isfinite(fx) || !all_finite(g)) non_finite("minimize_smooth", 0, fx);

  double step = 1.0;
  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (kernels::norm(g) <= cfg.gradient_tolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t j = 0; j < d; ++j) dir[j] = -g[j] / h[j];

    double t = step;
    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] + t * dir[j];
      const bool capped = cap_norm(trial, cfg.norm_cap);
      f_trial = f(trial, trial_grad);
      if (std::isfinite(f_trial) && all_finite(trial_grad)) {
        double decrease = 0.0;
        for (std::size_t j = 0; j < d; ++j) decrease += g[j] * (trial[j] - x[j]);
        if (f_trial <= fx + kArmijo * decrease) {
          accepted = true;
          result.hit_norm_cap = result.hit_norm_cap || capped;
          break;
        }
      }
      t *= 0.5;
      if (t < kMinStep) break;
    }
    if (!accepted) {
      if (!std::isfinite(f_trial)) non_finite("minimize_smooth", it, f_trial);
      // No descent possible at working precision.
      result.converged = true;
      break;
    }

    double sy = 0.0, shs = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double s = trial[j] - x[j];
      sy += s * (trial_grad[j] - g[j]);
      shs += h[j] * s * s;
    }
    step = sy > 0.0 ? std::clamp(shs / sy, kMinStep, kMaxStep) : std::min(2.0 * t, kMaxStep);

    x.swap(trial);
    g.swap(trial_grad);
    fx = f_trial;
  }
  result.point = std::move(x);
  result.value = fx;
  result.iterations = it;
  return result;
}

namespace {

// Solves (H + damping I) p = rhs by Cholesky; false when not positive definite.
bool cholesky_solve(const Matrix& h, double damping, std::span<const double> rhs,
                    std::span<double> out) {
  const std::size_t d = h.rows();
  Matrix l(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = h(j, j) + damping;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = h(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double v = rhs[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * out[k];
    out[i] = v / l(i, i);
  }
  for (std::size_t i = d; i-- > 0;) {
    double v = out[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= l(k, i) * out[k];
    out[i] = v / l(i, i);
  }
  return true;
}

}  // namespace

SolverResult minimize_newton(const SecondOrderObjective& f, Vector start, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t d = start.size();
  SolverResult result;
  Vector x = std::move(start);
  Vector g(d), trial(d), trial_grad(d), dir(d), neg_g(d);
  Matrix h(d, d), trial_h(d, d);
  double fx = f(x, g, &h);
  if (!std::isfinite(fx) || !all_finite(g)) non_finite("minimize_newton", 0, fx);

  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (kernels::norm(g) <= cfg.gradient_tolerance) {
      result.converged = true;
      break;
    }
    double scale = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      scale = std::max(scale, std::abs(h(j, j)));
      neg_g[j] = -g[j];
    }
    double damping = 0.0;
    bool solved = cholesky_solve(h, damping, neg_g, dir);
    for (int attempt = 0; !solved && attempt < 40; ++attempt) {
      damping = damping == 0.0 ? 1e-12 * (1.0 + scale) : 10.0 * damping;
      solved = cholesky_solve(h, damping, neg_g, dir);
    }
    if (!solved) {
      for (std::size_t j = 0; j < d; ++j) dir[j] = neg_g[j];
    }
    const double slope = kernels::dot(g, dir);
    if (!(slope < 0.0)) {
      result.converged = true;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] + t * dir[j];
      const bool capped = cap_norm(trial, cfg.norm_cap);
      f_trial = f(trial, trial_grad, &trial_h);
      if (std::isfinite(f_trial) && all_finite(trial_grad)) {
        double decrease = 0.0;
        for (std::size_t j = 0; j < d; ++j) decrease += g[j] * (trial[j] - x[j]);
        if (f_trial <= fx + kArmijo * decrease) {
          accepted = true;
          result.hit_norm_cap = result.hit_norm_cap || capped;
          break;
        }
      }
      t *= 0.5;
      if (t < kMinStep) break;
    }
    if (!accepted) {
      if (!std::isfinite(f_trial)) non_finite("minimize_newton", it, f_trial);
      result.converged = true;
      break;
    }
    x.swap(trial);
    g.swap(trial_grad);
    std::swap(h, trial_h);
    const double previous = fx;
    fx = f_trial;
    // Newton decrement below rounding level: nothing left to gain.
    if (-slope <= 1e-15 * (1.0 + std::abs(fx)) && previous - fx <= 1e-15 * (1.0 + std::abs(fx))) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.point = std::move(x);
  result.value = fx;
  result.iterations = it;
  return result;
}

SolverResult minimize_subgradient(const Objective& f, Vector start, const SolverConfig& cfg,
                                  std::span<const double> metric) {
  cfg.validate();
  const std::size_t d = start.size();
  const Vector h = resolve_metric(metric, d);
  constexpr std::size_t kEpochs = 40;
  const std::size_t epoch_length = std::max<std::size_t>(50, cfg.max_iterations / 4);

  SolverResult result;
  Vector x = std::move(start);
  Vector g(d);
  double fx = f(x, g);
  if (!std::isfinite(fx)) non_finite("minimize_subgradient", 0, fx);
  Vector best = x;
  double f_best = fx;

  // Steps are taken in the scaled coordinates u = sqrt(h) * x.
  double radius = 1.0;
  std::size_t it = 0;
  for (std::size_t epoch = 0; epoch < kEpochs; ++epoch) {
    x = best;
    fx = f(x, g);
    for (std::size_t k = 0; k < epoch_length; ++k, ++it) {
      double gnorm2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) gnorm2 += g[j] * g[j] / h[j];
      if (gnorm2 == 0.0) {
        result.converged = true;
        break;
      }
      const double scale = radius / std::sqrt(gnorm2);
      for (std::size_t j = 0; j < d; ++j) x[j] -= scale * g[j] / h[j];
      result.hit_norm_cap = cap_norm(x, cfg.norm_cap) || result.hit_norm_cap;
      fx = f(x, g);
      if (!std::isfinite(fx)) non_finite("minimize_subgradient", it, fx);
      if (fx < f_best) {
        f_best = fx;
        best = x;
      }
    }
    if (result.converged) break;
    radius *= 0.5;
  }
  result.point = std::move(best);
  result.value = f_best;
  result.iterations = it;
  return result;
}

double minimize_1d_bounded(const std::function<double(double)>& f, double c_max,
                           double tolerance) {
  if (!(c_max >= 0.0) || !std::isfinite(c_max)) {
    throw InvalidArgument("minimize_1d_bounded: interval end must be finite and >= 0");
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("minimize_1d_bounded: tolerance must be > 0");
  if (c_max == 0.0) return 0.0;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = c_max;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double interior = 0.5 * (a + b);
  double best = 0.0;
  double f_best = f(0.0);
  if (const double v = f(interior); v < f_best) {
    best = interior;
    f_best = v;
  }
  if (f(c_max) < f_best) best = c_max;
  return best;
}

SolverResult minimize_l1_regularized(const Objective& loss_part, double lambda,
                                     std::size_t dimension, const SolverConfig& cfg,
                                     std::size_t unpenalized, std::span<const double> metric) {
  cfg.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("minimize_l1_regularized: lambda must be finite and >= 0");
  }
  const std::size_t d = dimension;
  const Vector h = resolve_metric(metric, d);
  const auto penalty = [&](std::span<const double> w) {
    double s = 0.0;
    for (std::size_t j = unpenalized; j < d; ++j) s += std::abs(w[j]);
    return lambda * s;
  };

  SolverResult result;
  Vector x(d, 0.0), g(d), trial(d), trial_grad(d);
  double fx = loss_part(x, g);
  if (!std::isfinite(fx) || !all_finite(g)) non_finite("minimize_l1_regularized", 0, fx);

  double step = 1.0;
  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    double t = step;
    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t j = 0; j < d; ++j) {
        const double v = x[j] - t * g[j] / h[j];
        if (j < unpenalized) {
          trial[j] = v;
        } else {
          const double thresh = t * lambda / h[j];
          trial[j] = v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
        }
      }
      f_trial = loss_part(trial, trial_grad);
      if (std::isfinite(f_trial) && all_finite(trial_grad)) {
        double model = fx;
        for (std::size_t j = 0; j < d; ++j) {
          const double s = trial[j] - x[j];
          model += g[j] * s + 0.5 / t * h[j] * s * s;
        }
        if (f_trial <= model + 1e-15 * std::abs(model)) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
      if (t < kMinStep) break;
    }
    if (!accepted) {
      if (!std::isfinite(f_trial)) non_finite("minimize_l1_regularized", it, f_trial);
      result.converged = true;
      break;
    }

    double mapping = 0.0, sy = 0.0, shs = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double s = trial[j] - x[j];
      mapping += (h[j] * s / t) * (h[j] * s / t);
      sy += s * (trial_grad[j] - g[j]);
      shs += h[j] * s * s;
    }
    step = sy > 0.0 ? std::clamp(shs / sy, kMinStep, kMaxStep) : std::min(2.0 * t, kMaxStep);
    x.swap(trial);
    g.swap(trial_grad);
    fx = f_trial;
    if (std::sqrt(mapping) <= cfg.gradient_tolerance) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.value = fx + penalty(x);
  result.point = std::move(x);
  result.iterations = it;
  return result;
}

SolverResult minimize_l1_newton(const SecondOrderObjective& loss_part, double lambda,
                                std::size_t dimension, const SolverConfig& cfg,
                                std::size_t unpenalized) {
  cfg.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("minimize_l1_newton: lambda must be finite and >= 0");
  }
  const std::size_t d = dimension;
  const auto penalty = [&](std::span<const double> w) {
    double s = 0.0;
    for (std::size_t j = unpenalized; j < d; ++j) s += std::abs(w[j]);
    return lambda * s;
  };
  const auto soft = [](double v, double thresh) {
    return v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
  };

  SolverResult result;
  Vector x(d, 0.0), g(d), trial(d), trial_grad(d), step(d), hstep(d);
  Matrix h(d, d), trial_h(d, d);
  double fx = loss_part(x, g, &h);
  if (!std::isfinite(fx) || !all_finite(g)) non_finite("minimize_l1_newton", 0, fx);
  double total = fx + penalty(x);

  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    // Optimality: the minimum-norm element of the subdifferential.
    double residual = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double r = g[j];
      if (j >= unpenalized) {
        if (x[j] != 0.0) {
          r += x[j] > 0 ? lambda : -lambda;
        } else {
          r = std::max(std::abs(g[j]) - lambda, 0.0);
        }
      }
      residual += r * r;
    }
    if (std::sqrt(residual) <= cfg.gradient_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(step.begin(), step.end(), 0.0);
    std::fill(hstep.begin(), hstep.end(), 0.0);
    for (int sweep = 0; sweep < 200; ++sweep) {
      double change = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double a = h(j, j);
        if (!(a > 0.0)) continue;
        const double b = g[j] + hstep[j] - a * step[j];
        const double z = j < unpenalized ? -b / a : soft(x[j] - b / a, lambda / a) - x[j];
        const double delta = z - step[j];
        if (delta == 0.0) continue;
        step[j] = z;
        for (std::size_t i = 0; i < d; ++i) hstep[i] += h(i, j) * delta;
        change = std::max(change, a * delta * delta);
      }
      if (change <= 1e-24 * (1.0 + std::abs(total))) break;
    }

    for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] + step[j];
    const double predicted = kernels::dot(g, step) + penalty(trial) - penalty(x);
    if (!(predicted < 0.0)) {
      result.converged = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] + t * step[j];
      f_trial = loss_part(trial, trial_grad, &trial_h);
      if (std::isfinite(f_trial) && all_finite(trial_grad) &&
          f_trial + penalty(trial) <= total + kArmijo * t * predicted) {
        accepted = true;
        break;
      }
      t *= 0.5;
      if (t < kMinStep) break;
    }
    if (!accepted) {
      if (!std::isfinite(f_trial)) non_finite("minimize_l1_newton", it, f_trial);
      result.converged = true;
      break;
    }
    x.swap(trial);
    g.swap(trial_grad);
    std::swap(h, trial_h);
    const double previous = total;
    fx = f_trial;
    total = fx + penalty(x);
    if (previous - total <= 1e-15 * (1.0 + std::abs(total)) &&
        -predicted <= 1e-15 * (1.0 + std::abs(total))) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.value = total;
  result.point = std::move(x);
  result.iterations = it;
  return result;
}

MarginObjective::MarginObjective(const Matrix& features, LossKind kind, double ridge, double l2,
                                 std::size_t unpenalized)
    : features_(features), kind_(kind), ridge_(ridge), l2_(l2), unpenalized_(unpenalized) {
  if (features.rows() == 0) throw InvalidArgument("MarginObjective: no samples");
}

double MarginObjective::evaluate(std::span<const double> w, std::span<double> grad,
                                 Matrix* hessian) const {
  const std::size_t n = features_.rows();
  const std::size_t d = features_.cols();
  Vector margins(n), slope(n);
  kernels::gemv(features_.data(), n, d, w, margins);
  const double inv_n = 1.0 / static_cast<double>(n);
  double value;
  if (is_fittable(kind_)) {
    value = kernels::loss_sum_with_derivative(kind_, margins, slope) * inv_n;
    for (double& s : slope) s *= inv_n;
    kernels::gemv_t(features_.data(), n, d, slope, grad);
  } else {
    value = kernels::loss_sum(kind_, margins) * inv_n;
    for (double& v : grad) v = 0.0;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double coef = ridge_ + (j >= unpenalized_ ? l2_ : 0.0);
    value += coef * w[j] * w[j];
    grad[j] += 2.0 * coef * w[j];
  }
  if (hessian != nullptr) {
    if (!is_fittable(kind_)) throw InvalidArgument("MarginObjective: zero_one has no Hessian");
    Matrix& h = *hessian;
    if (h.rows() != d || h.cols() != d) h = Matrix(d, d);
    std::fill(h.data().begin(), h.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = loss_second_derivative(kind_, margins[i]) * inv_n;
      if (c == 0.0) continue;
      const auto r = features_.row(i);
      for (std::size_t a = 0; a < d; ++a) {
        const double ca = c * r[a];
        if (ca == 0.0) continue;
        double* row = h.data().data() + a * d;
        for (std::size_t b = a; b < d; ++b) row[b] += ca * r[b];
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      h(a, a) += 2.0 * (ridge_ + (a >= unpenalized_ ? l2_ : 0.0));
      for (std::size_t b = 0; b < a; ++b) h(a, b) = h(b, a);
    }
  }
  return value;
}

double MarginObjective::mean_loss(std::span<const double> w) const {
  Vector margins = multiply(features_, w);
  return kernels::loss_sum(kind_, margins) / static_cast<double>(features_.rows());
}

Vector MarginObjective::diagonal_metric() const {
  const std::size_t n = features_.rows();
  const std::size_t d = features_.cols();
  Vector h(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = features_.row(i);
    for (std::size_t j = 0; j < d; ++j) h[j] += r[j] * r[j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    h[j] = h[j] / static_cast<double>(n) + 2.0 * (ridge_ + (j >= unpenalized_ ? l2_ : 0.0));
    if (!(h[j] > 0.0)) h[j] = 1.0;
  }
  return h;
}

SolverResult fit_margin_objective(const MarginObjective& objective, LossKind kind,
                                  const SolverConfig& cfg) {
  require_fittable(kind);
  Vector start(objective.dimension(), 0.0);
  if (is_differentiable(kind) && objective.dimension() <= kNewtonMaxDimension) {
    return minimize_newton(
        [&objective](std::span<const double> w, std::span<double> g, Matrix* h) {
          return objective.evaluate(w, g, h);
        },
        std::move(start), cfg);
  }
  const Vector metric = objective.diagonal_metric();
  const Objective f = [&objective](std::span<const double> w, std::span<double> g) {
    return objective(w, g);
  };
  if (is_differentiable(kind)) return minimize_smooth(f, std::move(start), cfg, metric);
  return minimize_subgradient(f, std::move(start), cfg, metric);
}

}  // namespace rolin
