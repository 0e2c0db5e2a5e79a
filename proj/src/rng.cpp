/*
 * Copyright 2026 The sparseq authors.
 *
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

#include "sparseq/rng.hpp"

#include "sparseq/errors.hpp"
#include "sparseq/normal.hpp"

namespace sparseq {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + kGamma) + stream * kGamma)) {}

std::uint64_t CounterRng::at(std::uint64_t index) const {
  return mix(key_ + (index + 1) * kGamma);
}

std::uint64_t CounterRng::next_u64() { return at(counter_++); }

double CounterRng::uniform01() {
  // (draw >> 12) in [0, 2^52); the +0.5 keeps the result strictly inside
  // (0,1) so inverse-CDF draws stay finite.
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double CounterRng::normal() { return normal_quantile(uniform01()); }

std::uint32_t CounterRng::uniform_int(std::uint32_t n) {
  if (n == 0) {
    throw DomainError("uniform_int needs n > 0");
  }
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint32_t>(wide >> 64);
}

}  // namespace sparseq
