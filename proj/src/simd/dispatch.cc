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

#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "activeaudit/simd/kernels.h"

namespace activeaudit::simd {

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(ACTIVEAUDIT_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string("ISA not supported: ") + isa_name(isa));
  }
#if defined(ACTIVEAUDIT_HAVE_AVX2)
  if (isa == Isa::kAvx2) return detail::kAvx2Table;
#endif
  return detail::kScalarTable;
}

namespace {

const KernelTable& select_table() {
  const char* forced = std::getenv("ACTIVEAUDIT_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return detail::kScalarTable;
  if (isa_supported(Isa::kAvx2)) return kernels_for(Isa::kAvx2);
  return detail::kScalarTable;
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = select_table();
  return table;
}

}  // namespace activeaudit::simd
