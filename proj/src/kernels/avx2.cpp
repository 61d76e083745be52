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

// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached after the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include "variants.hpp"

namespace rolin::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot3(const double* x, const double* y, std::size_t n, double* xx, double* yy, double* xy) {
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    a = _mm256_fmadd_pd(vx, vx, a);
    b = _mm256_fmadd_pd(vy, vy, b);
    c = _mm256_fmadd_pd(vx, vy, c);
  }
  double sa = hsum(a), sb = hsum(b), sc = hsum(c);
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
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, vx, _mm256_mul_pd(vs, vy)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vx, _mm256_mul_pd(vc, vy)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Piecewise-polynomial losses vectorize directly; the logistic loss needs
// exp/log1p and stays on the scalar path.
double loss_eval(LossKind kind, const double* margins, double* derivative, std::size_t n) {
  if (kind == LossKind::logistic) return scalar_loss_eval(kind, margins, derivative, n);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  const __m256d minus_two = _mm256_set1_pd(-2.0);
  const __m256d minus_four = _mm256_set1_pd(-4.0);

  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_loadu_pd(margins + i);
    const __m256d slack = _mm256_max_pd(_mm256_sub_pd(one, m), zero);
    __m256d value;
    __m256d slope;
    switch (kind) {
      case LossKind::hinge:
        value = slack;
        slope = _mm256_and_pd(_mm256_cmp_pd(m, one, _CMP_LT_OQ), minus_one);
        break;
      case LossKind::squared_hinge:
        value = _mm256_mul_pd(slack, slack);
        slope = _mm256_mul_pd(minus_two, slack);
        break;
      case LossKind::modified_huber: {
        const __m256d linear = _mm256_cmp_pd(m, minus_one, _CMP_LT_OQ);
        value = _mm256_blendv_pd(_mm256_mul_pd(slack, slack), _mm256_mul_pd(minus_four, m), linear);
        slope = _mm256_blendv_pd(_mm256_mul_pd(minus_two, slack), minus_four, linear);
        break;
      }
      default:  // zero_one
        value = _mm256_and_pd(_mm256_cmp_pd(m, zero, _CMP_LE_OQ), one);
        slope = zero;
        break;
    }
    acc = _mm256_add_pd(acc, value);
    if (derivative) _mm256_storeu_pd(derivative + i, slope);
  }
  double sum = hsum(acc);
  if (i < n) sum += scalar_loss_eval(kind, margins + i, derivative ? derivative + i : nullptr, n - i);
  return sum;
}

}  // namespace

const Table kAvx2Table = {"avx2", dot, axpy, dot3, rotate, loss_eval};

}  // namespace rolin::kernels::detail
