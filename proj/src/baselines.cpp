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

#include "rolin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rolin/core.hpp"
#include "rolin/error.hpp"
#include "rolin/linalg.hpp"
#include "rolin/parallel.hpp"
#include "rolin/robust_cv.hpp"

namespace rolin {

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, -4.0 + 6.0 * static_cast<double>(i) / 7.0);
  }
  return grid;
}

void BaselineConfig::validate() const {
  if (method == Method::rolin) throw InvalidArgument("baseline: method must be l1, l2 or top_pcs");
  if (method == Method::top_pcs) {
    for (std::size_t k : k_grid) {
      if (k < 1) throw InvalidArgument("baseline: k values must be at least 1");
    }
  } else {
    if (lambda_grid.empty()) throw InvalidArgument("baseline: empty lambda grid");
    for (double l : lambda_grid) {
      if (!(l >= 0.0) || !std::isfinite(l)) {
        throw InvalidArgument("baseline: lambda values must be finite and >= 0");
      }
    }
  }
  if (normalize_options.empty()) throw InvalidArgument("baseline: no normalize option");
  if (fold_count < 2) throw InvalidArgument("baseline: fold_count must be at least 2");
  if (instance_count < 1) throw InvalidArgument("baseline: instance_count must be at least 1");
  if (threads < 1) throw InvalidArgument("baseline: threads must be at least 1");
}

namespace {

void copy_metadata(LinearModel& model, const LabeledDataset& data) {
  model.feature_names = data.feature_names;
  model.label_column = data.label_column;
  model.positive_label = data.positive_label;
  model.negative_label = data.negative_label;
}

}  // namespace

LinearModel fit_regularized(const LabeledDataset& data, LossKind loss, int q, double lambda,
                            bool normalize, const SolverConfig& cfg) {
  require_fittable(loss);
  if (q != 1 && q != 2) throw InvalidArgument("fit_regularized: q must be 1 or 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("fit_regularized: lambda must be finite and >= 0");
  }
  data.validate();
  if (data.size() == 0) throw InvalidArgument("fit_regularized: empty dataset");

  LinearModel model;
  Matrix x = data.features;
  if (normalize) {
    model.normalization = FeatureScaling::fit(x);
    x = model.normalization->apply(x);
  }
  // Column 0 carries y_i so that w[0] is the intercept.
  const std::size_t n = data.size();
  const std::size_t p = data.dimension();
  Matrix features(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = data.labels[i];
    features(i, 0) = y;
    for (std::size_t j = 0; j < p; ++j) features(i, j + 1) = y * x(i, j);
  }

  SolverResult fit;
  if (q == 2) {
    const MarginObjective obj(features, loss, cfg.stability_ridge, lambda, 1);
    fit = fit_margin_objective(obj, loss, cfg);
  } else if (is_differentiable(loss) && p + 1 <= kNewtonMaxDimension) {
    const MarginObjective obj(features, loss, cfg.stability_ridge);
    fit = minimize_l1_newton(
        [&obj](std::span<const double> w, std::span<double> g, Matrix* h) {
          return obj.evaluate(w, g, h);
        },
        lambda, p + 1, cfg, 1);
  } else {
    const MarginObjective obj(features, loss, cfg.stability_ridge);
    const Vector metric = obj.diagonal_metric();
    fit = minimize_l1_regularized(
        [&obj](std::span<const double> w, std::span<double> g) { return obj(w, g); }, lambda,
        p + 1, cfg, 1, metric);
  }

  model.intercept = fit.point[0];
  model.weights.assign(fit.point.begin() + 1, fit.point.end());
  model.loss_kind = loss;
  model.method = q == 1 ? Method::l1 : Method::l2;
  model.lambda = lambda;
  model.fitted_hyperparams.normalize = normalize;
  copy_metadata(model, data);
  return model;
}

LinearModel fit_top_pcs(const LabeledDataset& data, LossKind loss, std::size_t k, bool normalize,
                        const SolverConfig& cfg) {
  require_fittable(loss);
  const PreparedData prepared = prepare(data, normalize);
  if (k < 1 || k > prepared.rank()) {
    throw InvalidArgument("fit_top_pcs: k = " + std::to_string(k) + " must be in [1, rank = " +
                          std::to_string(prepared.rank()) + "]");
  }
  const SubspaceFit fit = fit_subspace_classifier(prepared, k, loss, cfg);
  LinearModel model;
  model.intercept = fit.intercept;
  model.weights = fit.weights;
  model.loss_kind = loss;
  model.normalization = prepared.scaling;
  model.fitted_hyperparams = HyperParams{k, 0.0, 0.0, normalize};
  model.method = Method::top_pcs;
  copy_metadata(model, data);
  return model;
}

LinearModel cross_validate_baseline(const LabeledDataset& data, LossKind loss,
                                    const BaselineConfig& config, const SolverConfig& cfg,
                                    BaselineCVResult* selection) {
  config.validate();
  require_fittable(loss);
  data.validate();
  const LossKind objective = config.cv_objective.value_or(loss);
  const std::vector<Split> splits =
      make_splits(data.size(), config.fold_count, config.instance_count, config.seed);
  std::vector<LabeledDataset> train, holdout;
  for (const auto& s : splits) {
    train.push_back(data.subset(s.train));
    holdout.push_back(data.subset(s.holdout));
  }
  std::vector<bool> norms;
  for (bool v : {false, true}) {
    if (std::find(config.normalize_options.begin(), config.normalize_options.end(), v) !=
        config.normalize_options.end()) {
      norms.push_back(v);
    }
  }

  std::vector<BaselineCandidate> candidates;
  if (config.method == Method::top_pcs) {
    std::vector<std::size_t> ks = config.k_grid;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (bool norm : norms) {
      std::size_t cap = std::numeric_limits<std::size_t>::max();
      for (const auto& t : train) cap = std::min(cap, prepare(t, norm).rank());
      if (cap == 0) throw InvalidArgument("baseline: a training fold has rank 0");
      std::vector<std::size_t> grid = ks;
      if (grid.empty()) {
        for (std::size_t k = 1; k <= std::min(cap, kDefaultTopPcsLimit); ++k) grid.push_back(k);
      }
      for (std::size_t k : grid) {
        if (k > cap) {
          throw InvalidArgument("baseline: k = " + std::to_string(k) +
                                " exceeds the smallest training-fold rank " + std::to_string(cap));
        }
        candidates.push_back({0.0, k, norm, 0.0});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      return a.k != b.k ? a.k < b.k : (!a.normalize && b.normalize);
    });
  } else {
    std::vector<double> lambdas = config.lambda_grid;
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    for (double l : lambdas) {
      for (bool norm : norms) candidates.push_back({l, 0, norm, 0.0});
    }
  }

  const int q = config.method == Method::l1 ? 1 : 2;
  const auto fit_one = [&](const BaselineCandidate& c, const LabeledDataset& d) {
    return config.method == Method::top_pcs ? fit_top_pcs(d, loss, c.k, c.normalize, cfg)
                                            : fit_regularized(d, loss, q, c.lambda, c.normalize, cfg);
  };

  const std::size_t per = splits.size();
  std::vector<double> losses(candidates.size() * per);
  parallel_for(losses.size(), config.threads, [&](std::size_t task) {
    const std::size_t j = task % per;
    const LinearModel m = fit_one(candidates[task / per], train[j]);
    losses[task] = mean_loss(m, holdout[j], objective);
  });
  std::size_t chosen = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < per; ++j) sum += losses[c * per + j];
    candidates[c].holdout_mean = sum / static_cast<double>(per);
    if (candidates[c].holdout_mean < candidates[chosen].holdout_mean) chosen = c;
  }

  LinearModel model = fit_one(candidates[chosen], data);
  if (selection != nullptr) {
    selection->candidates = std::move(candidates);
    selection->chosen = chosen;
  }
  return model;
}

}  // namespace rolin
