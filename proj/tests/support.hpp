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

// Shared generators and Eigen conversions for the test binaries.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "rolin/data.hpp"
#include "rolin/matrix.hpp"
#include "rolin/model.hpp"
#include "rolin/random.hpp"

namespace rolin::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

/// Two Gaussian classes with means +-shift * (1, 1/2, 1/3, ...); feature j
/// has standard deviation 1 + j / 2 so the spectrum is not flat.
inline LabeledDataset gaussian_classes(std::size_t n, std::size_t p, std::uint64_t seed,
                                       double shift = 0.7) {
  Rng rng(seed);
  LabeledDataset d;
  d.features = Matrix(n, p);
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Alternate labels so both classes are always present.
    const double y = i % 2 == 0 ? 1.0 : -1.0;
    d.labels[i] = y;
    for (std::size_t j = 0; j < p; ++j) {
      d.features(i, j) = y * shift / double(j + 1) + (1.0 + 0.5 * double(j)) * rng.normal();
    }
  }
  for (std::size_t j = 0; j < p; ++j) d.feature_names.push_back("f" + std::to_string(j));
  return d;
}

/// Classes N(+-mu, diag(sd^2)) with equal priors, in feature units of size
/// `unit`. The first `noise_dims` coordinates carry no signal and have
/// standard deviation noise_sd * unit, so they own the top principal
/// components; the next `signal_dims` coordinates are shifted by
/// +-shift * unit; the rest are unit-variance noise.
struct ShiftedGaussians {
  std::size_t p = 50;
  std::size_t noise_dims = 2;
  double noise_sd = 3.0;
  std::size_t signal_dims = 8;
  double shift = 0.5;
  double unit = 30.0;

  double mean(std::size_t j) const {
    return j >= noise_dims && j < noise_dims + signal_dims ? shift * unit : 0.0;
  }
  double sd(std::size_t j) const { return j < noise_dims ? noise_sd * unit : unit; }

  LabeledDataset draw(std::size_t n, Rng& rng) const {
    LabeledDataset d;
    d.features = Matrix(n, p);
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double y = rng.uniform() < 0.5 ? -1.0 : 1.0;
      d.labels[i] = y;
      for (std::size_t j = 0; j < p; ++j) d.features(i, j) = y * mean(j) + sd(j) * rng.normal();
    }
    return d;
  }

  /// The log-odds 2 mu^T Sigma^-1 x in nats. The logistic loss is in bits,
  /// but its minimizer over all score functions is still the true log-odds.
  LinearModel bayes() const {
    LinearModel m;
    m.weights.resize(p);
    for (std::size_t j = 0; j < p; ++j) m.weights[j] = 2.0 * mean(j) / (sd(j) * sd(j));
    return m;
  }
};

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace rolin::testing
