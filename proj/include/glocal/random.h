/*
 * Copyright 2026 The Glocal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Seed derivation. Every random stream of a run is derived from the single
// user seed, a stage tag and an index, so any stage can be reproduced alone.

#ifndef GLOCAL_RANDOM_H_
#define GLOCAL_RANDOM_H_

#include <cstdint>
#include <string_view>

namespace glocal {

// SplitMix64 finalizer.
constexpr std::uint64_t MixBits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over the tag.
constexpr std::uint64_t TagHash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t index = 0) {
  return MixBits(MixBits(seed ^ TagHash(tag)) + index);
}

}  // namespace glocal

#endif  // GLOCAL_RANDOM_H_
