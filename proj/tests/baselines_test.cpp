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
#include <vector>

#include "doctest.h"
#include "rolin/baselines.hpp"
#include "rolin/core.hpp"
#include "rolin/error.hpp"
#include "rolin/kernels.hpp"
#include "support.hpp"

using namespace rolin;
using rolin::testing::gaussian_classes;
using rolin::testing::max_abs_diff;

namespace {

SolverConfig bare_solver() {
  SolverConfig cfg;
  cfg.subspace_ridge_scale = 0.0;
  return cfg;
}

double l1_norm(const Vector& w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

Matrix signed_with_intercept(const LabeledDataset& d) {
  Matrix f(d.size(), d.dimension() + 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    f(i, 0) = d.labels[i];
    for (std::size_t j = 0; j < d.dimension(); ++j) f(i, j + 1) = d.labels[i] * d.features(i, j);
  }
  return f;
}

}  // namespace

TEST_CASE("default lambda grid") {
  const auto g = default_lambda_grid();
  REQUIRE(g.size() == 8);
  CHECK(g.front() == doctest::Approx(1e-4));
  CHECK(g.back() == doctest::Approx(1e2));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 6.0 / 7.0)));
  }
}

TEST_CASE("a dominating penalty leaves only the intercept") {
  LabeledDataset d = gaussian_classes(30, 4, 5);
  d.labels[1] = 1.0;  // 16 positives, 14 negatives
  const SolverConfig cfg = bare_solver();
  const BasisView none{{}, 0, 4};
  const auto intercept_only =
      fit_subspace_classifier(signed_matrix(d), d.labels, none, LossKind::logistic, cfg);
  for (int q : {1, 2}) {
    const LinearModel m = fit_regularized(d, LossKind::logistic, q, 1e9, false, cfg);
    CHECK(kernels::norm(m.weights) <= 1e-8);
    CHECK(m.intercept == doctest::Approx(intercept_only.intercept).epsilon(1e-6));
  }
  CHECK(l1_norm(fit_regularized(d, LossKind::logistic, 1, 1e9, false, cfg).weights) == 0.0);
}

TEST_CASE("lambda 0 is the plain empirical-risk fit") {
  const LabeledDataset d = gaussian_classes(40, 5, 6, 0.3);
  SolverConfig cfg;
  cfg.max_iterations = 100000;
  const Matrix f = signed_with_intercept(d);
  const MarginObjective obj(f, LossKind::logistic, cfg.stability_ridge);
  const auto gd = minimize_smooth(obj, Vector(f.cols(), 0.0), cfg, obj.diagonal_metric());
  for (int q : {1, 2}) {
    const LinearModel m = fit_regularized(d, LossKind::logistic, q, 0.0, false, cfg);
    CHECK(std::abs(m.intercept - gd.point[0]) <= 1e-6);
    CHECK(max_abs_diff(m.weights, std::span<const double>(gd.point).subspan(1)) <= 1e-6);
  }
}

TEST_CASE("L1 zeroes a pure-noise feature") {
  Rng rng(8);
  LabeledDataset d;
  d.features = Matrix(60, 2);
  for (std::size_t i = 0; i < 60; ++i) {
    const double y = i % 2 == 0 ? 1.0 : -1.0;
    d.labels.push_back(y);
    d.features(i, 0) = y + rng.normal();
    d.features(i, 1) = rng.normal();
  }
  const double lambda = 0.15;
  for (LossKind loss : {LossKind::logistic, LossKind::squared_hinge}) {
    const LinearModel m = fit_regularized(d, loss, 1, lambda, false, {});
    CHECK(m.weights[1] == 0.0);
    CHECK(m.weights[0] > 0.0);
    // KKT at the solution: the noise coordinate's gradient stays inside [-lambda, lambda].
    const Matrix f = signed_with_intercept(d);
    const MarginObjective obj(f, loss, SolverConfig{}.stability_ridge);
    std::vector<double> g(3);
    obj(Vector{m.intercept, m.weights[0], m.weights[1]}, g);
    CHECK(std::abs(g[2]) <= lambda);
  }
}

TEST_CASE("regularization paths shrink the weights") {
  const LabeledDataset d = gaussian_classes(30, 6, 15);
  const auto grid = default_lambda_grid();
  double prev_l2 = INFINITY, prev_l1 = INFINITY;
  for (double lambda : grid) {
    const double n2 = kernels::norm(fit_regularized(d, LossKind::logistic, 2, lambda, true, {}).weights);
    const double n1 = l1_norm(fit_regularized(d, LossKind::logistic, 1, lambda, true, {}).weights);
    CHECK(n2 <= prev_l2 + 1e-8);
    CHECK(n1 <= prev_l1 + 1e-8);
    prev_l2 = n2;
    prev_l1 = n1;
  }
}

TEST_CASE("top_pcs with k = rank is the plain empirical-risk fit") {
  const LabeledDataset d = gaussian_classes(40, 5, 16, 0.3);
  const SolverConfig cfg = bare_solver();
  const LinearModel m = fit_top_pcs(d, LossKind::squared_hinge, 5, false, cfg);
  const LinearModel erm = fit_regularized(d, LossKind::squared_hinge, 2, 0.0, false, cfg);
  CHECK(std::abs(m.intercept - erm.intercept) <= 1e-6);
  CHECK(max_abs_diff(m.weights, erm.weights) <= 1e-6);
  CHECK(m.method == Method::top_pcs);
  CHECK(m.fitted_hyperparams == HyperParams{5, 0.0, 0.0, false});
}

TEST_CASE("top_pcs with a label-aligned first component beats the intercept") {
  Rng rng(17);
  LabeledDataset d;
  d.features = Matrix(20, 5);
  for (std::size_t i = 0; i < 20; ++i) {
    const double y = i % 3 == 0 ? 1.0 : -1.0;
    d.labels.push_back(y);
    d.features(i, 0) = 4.0 * y + 0.5 * rng.normal();
    for (std::size_t j = 1; j < 5; ++j) d.features(i, j) = 0.3 * rng.normal();
  }
  const LinearModel m = fit_top_pcs(d, LossKind::logistic, 1, false, {});
  const BasisView none{{}, 0, 5};
  const auto b0 = fit_subspace_classifier(signed_matrix(d), d.labels, none, LossKind::logistic, {});
  LinearModel intercept_only;
  intercept_only.intercept = b0.intercept;
  intercept_only.weights.assign(5, 0.0);
  CHECK(mean_loss(m, d, LossKind::logistic) < mean_loss(intercept_only, d, LossKind::logistic));
}

TEST_CASE("top_pcs equals calc_beta with no robust component") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LabeledDataset d = gaussian_classes(12 + seed % 7, 3 + seed % 9, 3000 + seed);
    const std::size_t k = 1 + seed % 3;
    const bool norm = seed % 2 == 0;
    const LinearModel a = fit_top_pcs(d, LossKind::logistic, k, norm, {});
    const LinearModel b = calc_beta(d, HyperParams{k, 0.0, 0.0, norm}, LossKind::logistic, {});
    CHECK(max_abs_diff(a.weights, b.weights) <= 1e-10);
    CHECK(std::abs(a.intercept - b.intercept) <= 1e-10);
  }
}

TEST_CASE("argument checks") {
  const LabeledDataset d = gaussian_classes(10, 3, 1);
  CHECK_THROWS_AS(fit_regularized(d, LossKind::logistic, 3, 1.0, false, {}), InvalidArgument);
  CHECK_THROWS_AS(fit_regularized(d, LossKind::logistic, 2, -1.0, false, {}), InvalidArgument);
  CHECK_THROWS_AS(fit_regularized(d, LossKind::zero_one, 2, 1.0, false, {}), InvalidArgument);
  CHECK_THROWS_AS(fit_top_pcs(d, LossKind::logistic, 0, false, {}), InvalidArgument);
  CHECK_THROWS_AS(fit_top_pcs(d, LossKind::logistic, 4, false, {}), InvalidArgument);
  BaselineConfig cfg;
  cfg.method = Method::rolin;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.lambda_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.method = Method::top_pcs;
  cfg.k_grid = {0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.k_grid = {50};
  CHECK_THROWS_AS(cross_validate_baseline(d, LossKind::logistic, cfg, {}), InvalidArgument);
}

TEST_CASE("cross-validation with a single grid value") {
  const LabeledDataset d = gaussian_classes(20, 4, 21);
  BaselineConfig cfg;
  cfg.lambda_grid = {0.3};
  cfg.normalize_options = {false};
  BaselineCVResult sel;
  const LinearModel m = cross_validate_baseline(d, LossKind::logistic, cfg, {}, &sel);
  CHECK(sel.candidates.size() == 1);
  CHECK(m.lambda == 0.3);
  CHECK(m == fit_regularized(d, LossKind::logistic, 2, 0.3, false, {}));
}

TEST_CASE("cross-validation evaluates every grid value and keeps the best") {
  const LabeledDataset d = gaussian_classes(25, 4, 22, 1.5);
  for (Method method : {Method::l1, Method::l2}) {
    BaselineConfig cfg;
    cfg.method = method;
    cfg.lambda_grid = {1e9, 0.0};
    BaselineCVResult sel;
    const LinearModel m = cross_validate_baseline(d, LossKind::logistic, cfg, {}, &sel);
    REQUIRE(sel.candidates.size() == 4);
    CHECK(sel.candidates[0].lambda == 0.0);
    CHECK_FALSE(sel.candidates[0].normalize);
    CHECK(sel.candidates[1].normalize);
    for (const auto& c : sel.candidates) {
      CHECK(sel.candidates[sel.chosen].holdout_mean <= c.holdout_mean);
    }
    CHECK(m.lambda == sel.candidates[sel.chosen].lambda);
    CHECK(m.fitted_hyperparams.normalize == sel.candidates[sel.chosen].normalize);
  }
}

TEST_CASE("ties go to the smaller grid value") {
  // Zero features: every penalty gives the same intercept-only model.
  LabeledDataset d;
  d.features = Matrix(10, 2, 0.0);
  for (int i = 0; i < 10; ++i) d.labels.push_back(i < 6 ? 1.0 : -1.0);
  BaselineConfig cfg;
  cfg.lambda_grid = {1.0, 0.5};
  BaselineCVResult sel;
  const LinearModel m = cross_validate_baseline(d, LossKind::squared_hinge, cfg, {}, &sel);
  CHECK(sel.chosen == 0);
  CHECK(m.lambda == 0.5);
  CHECK_FALSE(m.fitted_hyperparams.normalize);
}

TEST_CASE("top_pcs cross-validation grid") {
  const LabeledDataset d = gaussian_classes(15, 20, 23);
  BaselineConfig cfg;
  cfg.method = Method::top_pcs;
  BaselineCVResult sel;
  const LinearModel m = cross_validate_baseline(d, LossKind::logistic, cfg, {}, &sel);
  // Training folds have 12 rows, so raw ranks are at most 12; centering
  // drops the normalized ranks to 11.
  CHECK(sel.candidates.size() == 23);
  CHECK(sel.candidates.front().k == 1);
  CHECK(sel.candidates.back().k == 12);
  CHECK(m.fitted_hyperparams.k == sel.candidates[sel.chosen].k);
  CHECK(m.method == Method::top_pcs);
}

TEST_CASE("baseline cross-validation is deterministic across thread counts") {
  const LabeledDataset d = gaussian_classes(20, 6, 24);
  BaselineConfig cfg;
  cfg.method = Method::l1;
  const LinearModel a = cross_validate_baseline(d, LossKind::modified_huber, cfg, {});
  cfg.threads = 4;
  const LinearModel b = cross_validate_baseline(d, LossKind::modified_huber, cfg, {});
  CHECK(a == b);
}
