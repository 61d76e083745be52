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

#include "variants.hpp"

namespace rolin::kernels::detail {
namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void dot3(const double* x, const double* y, std::size_t n, double* xx, double* yy, double* xy) {
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += x[i] * x[i];
    b += y[i] * y[i];
    c += x[i] * y[i];
  }
  *xx = a;
  *yy = b;
  *xy = c;
}

void rotate(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

double scalar_loss_eval(LossKind kind, const double* margins, double* derivative,
                        std::size_t n) {
  double sum = 0.0;
  switch (kind) {
    case LossKind::logistic:
      for (std::size_t i = 0; i < n; ++i) {
        const double m = margins[i];
        double value, slope;
        if (m >= 0.0) {
          const double e = std::exp(-m);
          value = std::log1p(e);
          slope = -e / (1.0 + e);
        } else {
          const double e = std::exp(m);
          value = -m + std::log1p(e);
          slope = -1.0 / (1.0 + e);
        }
        sum += value * kInvLn2;
        if (derivative) derivative[i] = slope * kInvLn2;
      }
      return sum;
    case LossKind::hinge:
      for (std::size_t i = 0; i < n; ++i) {
        const double slack = margins[i] < 1.0 ? 1.0 - margins[i] : 0.0;
        sum += slack;
        if (derivative) derivative[i] = margins[i] < 1.0 ? -1.0 : 0.0;
      }
      return sum;
    case LossKind::squared_hinge:
      for (std::size_t i = 0; i < n; ++i) {
        const double slack = margins[i] < 1.0 ? 1.0 - margins[i] : 0.0;
        sum += slack * slack;
        if (derivative) derivative[i] = -2.0 * slack;
      }
      return sum;
    case LossKind::modified_huber:
      for (std::size_t i = 0; i < n; ++i) {
        const double m = margins[i];
        if (m < -1.0) {
          sum += -4.0 * m;
          if (derivative) derivative[i] = -4.0;
        } else {
          const double slack = m < 1.0 ? 1.0 - m : 0.0;
          sum += slack * slack;
          if (derivative) derivative[i] = -2.0 * slack;
        }
      }
      return sum;
    case LossKind::zero_one:
      for (std::size_t i = 0; i < n; ++i) sum += margins[i] <= 0.0 ? 1.0 : 0.0;
      return sum;
  }
  return sum;
}

const Table kScalarTable = {"scalar", dot, axpy, dot3, rotate, scalar_loss_eval};

}  // namespace rolin::kernels::detail
