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

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rolin/baselines.hpp"
#include "rolin/core.hpp"
#include "rolin/error.hpp"
#include "rolin/kernels.hpp"
#include "support.hpp"

using namespace rolin;
using rolin::testing::cosine;
using rolin::testing::gaussian_classes;
using rolin::testing::max_abs_diff;
using rolin::testing::random_matrix;
using rolin::testing::to_eigen;

namespace {

SolverConfig bare_solver() {
  SolverConfig cfg;
  cfg.subspace_ridge_scale = 0.0;
  return cfg;
}

double mean_margin_loss(const Matrix& z, std::span<const double> labels, double b0,
                        std::span<const double> w, LossKind loss) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    s += loss_value(loss, b0 * labels[i] + kernels::dot(z.row(i), w));
  }
  return s / double(z.rows());
}

// nu from its closed form, with an SVD computed by Eigen.
Eigen::VectorXd oracle_nu(const Matrix& z, std::size_t k, double sigma_ratio) {
  const Eigen::MatrixXd zz = to_eigen(z);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(zz, Eigen::ComputeThinV);
  const Eigen::VectorXd d = svd.singularValues();
  const Eigen::MatrixXd v = svd.matrixV();
  Eigen::Index r = 0;
  while (r < d.size() && d(r) > 1e-10 * d(0)) ++r;
  const Eigen::VectorXd sum = zz.transpose() * Eigen::VectorXd::Ones(zz.rows());
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(zz.cols());
  if (Eigen::Index(k) >= r) return nu;
  const double bound = sigma_ratio * d(k) * d(k);
  for (Eigen::Index j = k; j < r; ++j) {
    nu += v.col(j) * (v.col(j).dot(sum) / (d(j) * d(j) + bound));
  }
  return nu;
}

}  // namespace

TEST_CASE("intercept-only fit on a single class") {
  const Matrix z = Matrix::from_rows({{1.0, 2.0}, {0.5, -1.0}, {2.0, 0.0}});
  const std::vector<double> labels{1.0, 1.0, 1.0};
  const BasisView none{{}, 0, 2};
  const auto fit = fit_subspace_classifier(z, labels, none, LossKind::logistic, bare_solver());
  CHECK(fit.intercept >= 5.0);
  CHECK(fit.weights == std::vector<double>{0.0, 0.0});
  CHECK(fit.coordinates.empty());
}

TEST_CASE("one-dimensional squared hinge fit") {
  // x = +-1 with y = x; signed rows are all +1.
  LabeledDataset d;
  d.features = Matrix::from_rows({{1.0}, {-1.0}, {1.0}, {-1.0}});
  d.labels = {1.0, -1.0, 1.0, -1.0};
  const PreparedData prep = prepare(d, false);
  const auto fit = fit_subspace_classifier(prep, 1, LossKind::squared_hinge, bare_solver());
  CHECK(std::abs(fit.intercept) <= 1e-6);
  CHECK(fit.weights[0] > 0.0);
  const double loss =
      mean_margin_loss(prep.z, prep.labels, fit.intercept, fit.weights, LossKind::squared_hinge);
  CHECK(loss < 1e-3);

  // The solver beats every point of a grid over (b0, gamma).
  const Matrix rows = Matrix::from_rows({{1, 1}, {-1, 1}, {1, 1}, {-1, 1}});
  const MarginObjective obj(rows, LossKind::squared_hinge, 1e-8);
  std::vector<double> g(2);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -200; i <= 200; ++i) {
    for (int j = 0; j <= 400; ++j) best = std::min(best, obj(Vector{i / 100.0, j / 100.0}, g));
  }
  CHECK(obj(Vector{fit.intercept, fit.coordinates[0]}, g) <= best + 1e-12);
}

TEST_CASE("zero features with balanced labels give a zero intercept") {
  for (LossKind loss : {LossKind::logistic, LossKind::hinge, LossKind::squared_hinge,
                        LossKind::modified_huber}) {
    const Matrix z(4, 3, 0.0);
    const std::vector<double> labels{1.0, -1.0, 1.0, -1.0};
    const BasisView none{{}, 0, 3};
    const auto fit = fit_subspace_classifier(z, labels, none, loss, SolverConfig{});
    CHECK(std::abs(fit.intercept) <= 1e-9);
    CHECK(mean_margin_loss(z, labels, fit.intercept, fit.weights, loss) ==
          doctest::Approx(loss_value(loss, 0.0)));
  }
}

TEST_CASE("robust direction vanishes when the signed sum lies in S0") {
  const Matrix z = Matrix::from_rows({{2.0, 1.0}, {2.0, -1.0}});
  const auto svd = thin_svd(z).with_split(1);
  const auto c = robust_direction(z, svd, 1.0);
  CHECK(c.is_zero());
  CHECK(kernels::norm(c.nu) <= 1e-12);
  CHECK(c.sigma_bound == doctest::Approx(2.0));
}

TEST_CASE("robust direction with k = 0 matches the closed form") {
  const Matrix z = random_matrix(4, 2, 17);
  const auto svd = thin_svd(z);
  const auto c = robust_direction(z, svd, 1.0);
  const Eigen::VectorXd expected = oracle_nu(z, 0, 1.0);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(c.nu[j] - expected(j)) <= 1e-12);
  CHECK(c.sigma_bound == svd.singular_values[0] * svd.singular_values[0]);
  // mu is the mean of the projected signed rows.
  for (std::size_t j = 0; j < 2; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) m += kernels::dot(svd.right_vectors.row(j), z.row(i));
    CHECK(c.mu[j] == doctest::Approx(m / 4.0));
  }
}

TEST_CASE("robust component invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix z = random_matrix(12, 6, 300 + seed);
    const auto svd = thin_svd(z);
    for (std::size_t k = 0; k <= svd.rank(); ++k) {
      const auto split = svd.with_split(k);
      for (double sigma : {0.0, 1.0, 10.0}) {
        const auto c = robust_direction(z, split, sigma);
        const double norm = kernels::norm(c.eta);
        CHECK((c.is_zero() || std::abs(norm - 1.0) <= 1e-10));
        for (std::size_t j = 0; j < k; ++j) {
          CHECK(std::abs(kernels::dot(split.s0().vector(j), c.eta)) <= 1e-8);
        }
        const auto values = split.complement_values();
        const double expected = values.empty() ? 0.0 : sigma * values[0] * values[0];
        CHECK(c.sigma_bound == expected);
      }
    }
  }
}

TEST_CASE("direction equals the ridge solution on projected features") {
  Rng rng(2024);
  const double sigmas[] = {1.0, 2.15, 4.64, 10.0};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.below(46);
    const std::size_t p = 2 + rng.below(19);
    const Matrix z = random_matrix(n, p, 5000 + trial);
    const auto svd = thin_svd(z);
    const std::size_t k = rng.below(svd.rank());
    const double sigma = sigmas[trial % 4];
    const auto split = svd.with_split(k);
    const auto c = robust_direction(z, split, sigma);

    Eigen::MatrixXd vot(p, split.complement().count);
    for (std::size_t j = 0; j < split.complement().count; ++j) {
      vot.col(j) = to_eigen(split.complement().vector(j));
    }
    const Eigen::MatrixXd zt = to_eigen(z) * vot * vot.transpose();
    // Per-sample bound sigma_bound / n; the total-loss penalty is n times that.
    const double lambda = double(n) * (c.sigma_bound / double(n));
    const Eigen::MatrixXd gram = zt.transpose() * zt + lambda * Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd ridge = gram.ldlt().solve(zt.transpose() * Eigen::VectorXd::Ones(n));
    CAPTURE(trial);
    CHECK(cosine(to_eigen(c.eta), ridge) >= 1.0 - 1e-8);
  }
}

TEST_CASE("large sigma ratio gives the projected mean direction") {
  const Matrix z = random_matrix(15, 8, 71);
  const auto split = thin_svd(z).with_split(2);
  const auto c = robust_direction(z, split, 1e6);
  const Eigen::VectorXd sum = to_eigen(z).transpose() * Eigen::VectorXd::Ones(15);
  Eigen::VectorXd projected = Eigen::VectorXd::Zero(8);
  for (std::size_t j = 0; j < split.complement().count; ++j) {
    const Eigen::VectorXd v = to_eigen(split.complement().vector(j));
    projected += v * v.dot(sum);
  }
  CHECK(cosine(to_eigen(c.eta), projected) >= 1.0 - 1e-6);
}

TEST_CASE("singular smoothed covariance is reported") {
  SubspaceDecomposition s;
  s.right_vectors = Matrix::identity(2);
  s.singular_values = {1.0, 0.0};
  s.left_vectors = Matrix::identity(2);
  const std::vector<double> sum{1.0, 1.0};
  CHECK_THROWS_AS(robust_direction(sum, 2, s, 0.0), NumericalError);
  CHECK_THROWS_AS(robust_direction(sum, 2, s, -1.0), InvalidArgument);
}

TEST_CASE("fit_magnitude edge cases") {
  const Matrix z = Matrix::from_rows({{1.0, 0.0}, {2.0, 0.0}, {-0.5, 0.0}});
  const std::vector<double> labels{1.0, -1.0, 1.0};
  const std::vector<double> beta{0.3, 0.0};
  const double tol = magnitude_tolerance(1.0);
  CHECK(fit_magnitude(z, labels, 0.1, beta, std::vector<double>{1.0, 0.0}, 0.0,
                      LossKind::logistic, tol) == 0.0);
  // eta . z_i = 0 for every row: constant objective.
  CHECK(fit_magnitude(z, labels, 0.1, beta, std::vector<double>{0.0, 1.0}, 1.0,
                      LossKind::logistic, tol) == 0.0);
  CHECK_THROWS_AS(fit_magnitude(z, labels, 0.1, beta, std::vector<double>{0.0, 1.0}, -1.0,
                                LossKind::logistic, tol),
                  InvalidArgument);
}

TEST_CASE("fit_magnitude matches a grid scan") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledDataset d = gaussian_classes(20, 4, 900 + seed);
    const Matrix z = signed_matrix(d);
    const std::vector<double> beta(4, 0.0);
    Vector eta(4, 0.0);
    eta[0] = 1.0;  // the mean shift is largest along the first feature
    const double b_max = seed % 2 == 0 ? 0.05 : 3.0;
    const auto f = [&](double c) {
      Vector w = beta;
      w[0] += c;
      return mean_margin_loss(z, d.labels, 0.0, w, LossKind::logistic);
    };
    double best_c = 0.0, best = f(0.0);
    for (int i = 1; i <= 10000; ++i) {
      const double c = b_max * i / 1e4;
      if (f(c) < best) {
        best = f(c);
        best_c = c;
      }
    }
    const double got = fit_magnitude(z, d.labels, 0.0, beta, eta, b_max, LossKind::logistic,
                                     magnitude_tolerance(b_max));
    CHECK(std::abs(got - best_c) <= 2 * magnitude_tolerance(b_max) + b_max / 1e4);
    if (seed % 2 == 0) CHECK(got == b_max);  // still descending at the small bound
  }
}

TEST_CASE("calc_beta with k = rank is the plain empirical-risk fit") {
  const SolverConfig cfg = bare_solver();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LabeledDataset d = gaussian_classes(40, 5, 40 + seed, 0.3);
    const auto rank = prepare(d, false).rank();
    const LinearModel m = calc_beta(d, HyperParams{rank, 0.0, 0.0, false}, LossKind::logistic, cfg);
    const LinearModel erm = fit_regularized(d, LossKind::logistic, 2, 0.0, false, cfg);
    CHECK(std::abs(m.intercept - erm.intercept) <= 1e-6);
    CHECK(max_abs_diff(m.weights, erm.weights) <= 1e-6);
  }
}

TEST_CASE("b_max = 0 gives the top-components model") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LabeledDataset d = gaussian_classes(20, 8, 70 + seed);
    for (std::size_t k : {1, 3}) {
      const LinearModel a =
          calc_beta(d, HyperParams{k, 4.64, 0.0, seed % 2 == 1}, LossKind::squared_hinge, {});
      const LinearModel b = fit_top_pcs(d, LossKind::squared_hinge, k, seed % 2 == 1, {});
      CHECK(a.intercept == b.intercept);
      CHECK(a.weights == b.weights);
    }
  }
}

TEST_CASE("fitted weights decompose into the S0 fit plus a bounded multiple of eta") {
  const LabeledDataset d = gaussian_classes(20, 10, 555);
  const SolverConfig cfg = bare_solver();
  const HyperParams psi{2, 1.0, 0.05, false};
  const LinearModel m = calc_beta(d, psi, LossKind::logistic, cfg);

  const PreparedData prep = prepare(d, false);
  const auto split = prep.svd.with_split(2);
  const auto s0 = fit_subspace_classifier(prep.z, prep.labels, split.s0(), LossKind::logistic, cfg);
  const Eigen::VectorXd w = to_eigen(m.weights);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(to_eigen(split.s0().vector(j)).dot(w) - s0.coordinates[j]) <= 1e-8);
  }
  CHECK(std::abs(m.intercept - s0.intercept) <= 1e-8);
  const Eigen::VectorXd residual = w - to_eigen(s0.weights);
  const Eigen::VectorXd nu = oracle_nu(prep.z, 2, 1.0);
  CHECK(residual.norm() <= psi.b_max + 1e-10);
  if (residual.norm() > 0.0) CHECK(cosine(residual, nu) >= 1.0 - 1e-8);
}

TEST_CASE("robust component norm never exceeds b_max") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledDataset d = gaussian_classes(15, 12, 1200 + seed);
    const PreparedData prep = prepare(d, seed % 2 == 0);
    const auto s0 = fit_subspace_classifier(prep, 1, LossKind::logistic, {});
    for (double b : {0.01, 0.1, 2.0}) {
      RobustComponent c;
      const LinearModel m =
          complete_model(prep, s0, HyperParams{1, 2.15, b, seed % 2 == 0}, LossKind::logistic, &c);
      CHECK(c.magnitude >= 0.0);
      CHECK(c.magnitude <= b + 1e-10);
      Vector diff(m.weights.size());
      for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = m.weights[j] - s0.weights[j];
      CHECK(kernels::norm(diff) <= b + 1e-10);
    }
  }
}

TEST_CASE("calc_beta argument checks") {
  const LabeledDataset d = gaussian_classes(6, 10, 3);
  CHECK_THROWS_AS(calc_beta(d, HyperParams{7, 0.0, 0.0, false}, LossKind::logistic, {}),
                  InvalidArgument);
  CHECK_THROWS_AS(calc_beta(d, HyperParams{1, -1.0, 0.0, false}, LossKind::logistic, {}),
                  InvalidArgument);
  CHECK_THROWS_AS(calc_beta(d, HyperParams{1, 1.0, 0.1, false}, LossKind::zero_one, {}),
                  InvalidArgument);
  const PreparedData raw = prepare(d, false);
  CHECK_THROWS_AS(calc_beta(raw, HyperParams{1, 1.0, 0.1, true}, LossKind::logistic, {}),
                  InvalidArgument);
}

TEST_CASE("normalized models score raw inputs") {
  const LabeledDataset d = gaussian_classes(25, 4, 8);
  const LinearModel m = calc_beta(d, HyperParams{2, 1.0, 0.1, true}, LossKind::logistic, {});
  REQUIRE(m.normalization.has_value());
  const PreparedData prep = prepare(d, true);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double direct = m.intercept + kernels::dot(m.weights, prep.scaling->apply(d.features).row(i));
    CHECK(m.score(d.features.row(i)) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(m.feature_names == d.feature_names);
  CHECK(m.fitted_hyperparams == HyperParams{2, 1.0, 0.1, true});
}

TEST_CASE("calc_beta is deterministic") {
  const LabeledDataset d = gaussian_classes(30, 9, 4242);
  const HyperParams psi{3, 2.15, 0.0464, true};
  CHECK(calc_beta(d, psi, LossKind::modified_huber, {}) ==
        calc_beta(d, psi, LossKind::modified_huber, {}));
}
