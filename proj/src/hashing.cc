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

#include "activeaudit/hashing.h"

#include <cmath>
#include <numbers>

namespace activeaudit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::string_view id) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ fnv1a64(id));
}

double to_open_unit(std::uint64_t bits) {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double hash_uniform(std::uint64_t seed, std::uint64_t stream, std::string_view id) {
  return to_open_unit(mix(seed, stream, id));
}

double hash_gaussian(std::uint64_t seed, std::uint64_t stream, std::string_view id) {
  const std::uint64_t h = mix(seed, stream, id);
  const double u1 = to_open_unit(h);
  const double u2 = to_open_unit(splitmix64(h));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace activeaudit
