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

#ifndef ACTIVEAUDIT_SIMD_KERNELS_H_
#define ACTIVEAUDIT_SIMD_KERNELS_H_

#include <cstddef>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; one table is selected at startup from CPUID
// and can be pinned with ACTIVEAUDIT_SIMD=scalar|avx2. The variants agree to
// rounding (see tests/kernels_test.cc), not bitwise.

namespace activeaudit::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;

  // Sum over all (i, j) of sigmoid((pos[i] - neg[j]) * inv_tau).
  // When grad_pos / grad_neg are non-null, also accumulates
  //   grad_pos[i] += inv_tau * sum_j sigmoid'(z_ij)
  //   grad_neg[j] -= inv_tau * sum_i sigmoid'(z_ij)
  double (*pair_sigmoid_sum)(const double* pos, std::size_t m, const double* neg,
                             std::size_t n, double inv_tau, double* grad_pos,
                             double* grad_neg);

  // out[r] = dot(matrix[rows[r]], w) + bias for r < count. `rows == nullptr`
  // means rows 0..count-1. Matrix is row-major with `cols` columns.
  void (*affine_rows)(const double* matrix, std::size_t cols, const std::size_t* rows,
                      std::size_t count, const double* w, double bias, double* out);

  // out[c] += sum_r coef[r] * matrix[rows[r]][c]  (transpose-multiply).
  void (*accumulate_rows)(const double* matrix, std::size_t cols, const std::size_t* rows,
                          std::size_t count, const double* coef, double* out);

  double (*dot)(const double* a, const double* b, std::size_t n);
};

bool isa_supported(Isa isa);
const char* isa_name(Isa isa);

// Kernel table for a specific ISA; throws std::invalid_argument if the CPU or
// build does not support it.
const KernelTable& kernels_for(Isa isa);

// Runtime-selected table (best supported unless overridden by environment).
const KernelTable& kernels();

// Numerically stable logistic pieces shared by every variant:
// with e = exp(-|z|), sigmoid(z) = 1/(1+e) for z >= 0 and e/(1+e) otherwise,
// sigmoid'(z) = e / (1+e)^2.
double sigmoid(double z);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(ACTIVEAUDIT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace activeaudit::simd

#endif  // ACTIVEAUDIT_SIMD_KERNELS_H_
