// include/dmtl/common/rng.h

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DMTL_COMMON_RNG_H_
#define DMTL_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace dmtl {

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent seed for a named stream. Streams derived from the same base seed
// never share draws, so adding or removing one consumer leaves the others
// untouched.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream,
                                std::uint64_t index = 0) {
  return SplitMix64(SplitMix64(seed ^ Fnv1a(stream)) + index);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) computed from raw engine output. The standard
// distributions are implementation-defined, these helpers are not.
inline double UniformUnit(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double Uniform(Rng &rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

double Gaussian(Rng &rng);

// Unbiased integer in [0, n).
std::uint64_t UniformIndex(Rng &rng, std::uint64_t n);

template <typename It>
void Shuffle(It first, It last, Rng &rng) {
  auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    std::uint64_t j = UniformIndex(rng, i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace dmtl

#endif  // DMTL_COMMON_RNG_H_
