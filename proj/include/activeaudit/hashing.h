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

#ifndef ACTIVEAUDIT_HASHING_H_
#define ACTIVEAUDIT_HASHING_H_

#include <cstdint>
#include <string_view>

namespace activeaudit {

// Order-independent per-id randomness: every draw is a pure function of
// (seed, stream, id), so scoring never depends on batch order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

// Uniform in the open interval (0, 1).
double hash_uniform(std::uint64_t seed, std::uint64_t stream, std::string_view id);
// Standard normal via Box-Muller over two hashed uniforms.
double hash_gaussian(std::uint64_t seed, std::uint64_t stream, std::string_view id);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_HASHING_H_
