// Copyright 2026 The ActiveAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "activeaudit/simd/kernels.h"

namespace activeaudit::simd {
namespace {

// exp(x) for x <= 0. Cody-Waite reduction to |r| <= ln2/2 followed by a
// degree-12 Taylor polynomial; relative error below 2e-16 on the domain.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(x, lo);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 479001600.0);  // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n through the exponent field; n is integral in [-1022, 0].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double pair_sigmoid_sum_avx2(const double* pos, std::size_t m, const double* neg, std::size_t n,
                             double inv_tau, double* grad_pos, double* grad_neg) {
  const bool want_grad = grad_pos != nullptr && grad_neg != nullptr;
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vtau = _mm256_set1_pd(inv_tau);
  const std::size_t n4 = n - n % 4;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const __m256d p = _mm256_set1_pd(pos[i]);
    __m256d sum_v = zero;
    __m256d grad_v = zero;
    for (std::size_t j = 0; j < n4; j += 4) {
      const __m256d z = _mm256_mul_pd(_mm256_sub_pd(p, _mm256_loadu_pd(neg + j)), vtau);
      const __m256d e = exp_nonpositive(_mm256_or_pd(z, sign_mask));  // exp(-|z|)
      const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(one, e));
      const __m256d upper = _mm256_cmp_pd(z, zero, _CMP_GE_OQ);
      sum_v = _mm256_add_pd(sum_v, _mm256_blendv_pd(_mm256_mul_pd(e, inv), inv, upper));
      if (want_grad) {
        const __m256d g = _mm256_mul_pd(_mm256_mul_pd(e, _mm256_mul_pd(inv, inv)), vtau);
        grad_v = _mm256_add_pd(grad_v, g);
        _mm256_storeu_pd(grad_neg + j, _mm256_sub_pd(_mm256_loadu_pd(grad_neg + j), g));
      }
    }
    double row_sum = hsum(sum_v);
    double row_grad = hsum(grad_v);
    for (std::size_t j = n4; j < n; ++j) {
      const double z = (pos[i] - neg[j]) * inv_tau;
      const double e = std::exp(-std::fabs(z));
      const double inv = 1.0 / (1.0 + e);
      row_sum += z >= 0.0 ? inv : e * inv;
      if (want_grad) {
        const double g = e * inv * inv * inv_tau;
        row_grad += g;
        grad_neg[j] -= g;
      }
    }
    total += row_sum;
    if (want_grad) grad_pos[i] += row_grad;
  }
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

void affine_rows_avx2(const double* matrix, std::size_t cols, const std::size_t* rows,
                      std::size_t count, const double* w, double bias, double* out) {
  for (std::size_t r = 0; r < count; ++r) {
    out[r] = dot_avx2(matrix + (rows ? rows[r] : r) * cols, w, cols) + bias;
  }
}

void accumulate_rows_avx2(const double* matrix, std::size_t cols, const std::size_t* rows,
                          std::size_t count, const double* coef, double* out) {
  const std::size_t c4 = cols - cols % 4;
  for (std::size_t r = 0; r < count; ++r) {
    const double* x = matrix + (rows ? rows[r] : r) * cols;
    const __m256d a = _mm256_set1_pd(coef[r]);
    for (std::size_t c = 0; c < c4; c += 4) {
      _mm256_storeu_pd(out + c, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + c), _mm256_loadu_pd(out + c)));
    }
    for (std::size_t c = c4; c < cols; ++c) out[c] += coef[r] * x[c];
  }
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table = {
    Isa::kAvx2, pair_sigmoid_sum_avx2, affine_rows_avx2, accumulate_rows_avx2, dot_avx2,
};
}  // namespace detail

}  // namespace activeaudit::simd
