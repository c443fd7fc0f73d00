// Copyright 2026 The Corrective IL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRECTIVE_IL_RNG_HPP_
#define CORRECTIVE_IL_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace corrective_il {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for stream `index` of `seed`. Per-item streams make parallel
// work independent of scheduling order.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return Mix64(Mix64(seed) ^ (index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Fixed-width lowercase hex, as embedded in artifacts.
inline std::string HashHex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

// Named sub-stream, e.g. DeriveSeed(seed, "restrictive-demos").
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag) {
  return DeriveSeed(seed, Fnv1a64(tag));
}

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_RNG_HPP_
