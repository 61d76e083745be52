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

// AArch64 NEON variants (Advanced SIMD is mandatory on AArch64, so no
// runtime probe is needed once this unit is compiled in).

#include <arm_neon.h>

#include "variants.hpp"

namespace rolin::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot3(const double* x, const double* y, std::size_t n, double* xx, double* yy, double* xy) {
  float64x2_t a = vdupq_n_f64(0.0);
  float64x2_t b = vdupq_n_f64(0.0);
  float64x2_t c = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vy = vld1q_f64(y + i);
    a = vfmaq_f64(a, vx, vx);
    b = vfmaq_f64(b, vy, vy);
    c = vfmaq_f64(c, vx, vy);
  }
  double sa = vaddvq_f64(a), sb = vaddvq_f64(b), sc = vaddvq_f64(c);
  for (; i < n; ++i) {
    sa += x[i] * x[i];
    sb += y[i] * y[i];
    sc += x[i] * y[i];
  }
  *xx = sa;
  *yy = sb;
  *xy = sc;
}

void rotate(double* x, double* y, std::size_t n, double c, double s) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vy = vld1q_f64(y + i);
    vst1q_f64(x + i, vfmsq_f64(vmulq_f64(vc, vx), vs, vy));
    vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vc, vy), vs, vx));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

// Loss evaluation is branch-heavy and short (n is the sample count); it
// reuses the scalar kernel here.
const Table kNeonTable = {"neon", dot, axpy, dot3, rotate, scalar_loss_eval};

}  // namespace rolin::kernels::detail
