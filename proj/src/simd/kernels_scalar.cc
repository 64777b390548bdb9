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

#include <cmath>

#include "activeaudit/simd/kernels.h"

namespace activeaudit::simd {

double sigmoid(double z) {
  const double e = std::exp(-std::fabs(z));
  return z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

namespace {

double pair_sigmoid_sum_scalar(const double* pos, std::size_t m, const double* neg,
                               std::size_t n, double inv_tau, double* grad_pos,
                               double* grad_neg) {
  double total = 0.0;
  const bool want_grad = grad_pos != nullptr && grad_neg != nullptr;
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    double row_grad = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
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

void affine_rows_scalar(const double* matrix, std::size_t cols, const std::size_t* rows,
                        std::size_t count, const double* w, double bias, double* out) {
  for (std::size_t r = 0; r < count; ++r) {
    const double* x = matrix + (rows ? rows[r] : r) * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += x[c] * w[c];
    out[r] = acc + bias;
  }
}

void accumulate_rows_scalar(const double* matrix, std::size_t cols, const std::size_t* rows,
                            std::size_t count, const double* coef, double* out) {
  for (std::size_t r = 0; r < count; ++r) {
    const double* x = matrix + (rows ? rows[r] : r) * cols;
    const double a = coef[r];
    for (std::size_t c = 0; c < cols; ++c) out[c] += a * x[c];
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

namespace detail {
const KernelTable kScalarTable = {
    Isa::kScalar, pair_sigmoid_sum_scalar, affine_rows_scalar, accumulate_rows_scalar, dot_scalar,
};
}  // namespace detail

}  // namespace activeaudit::simd
