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

#ifndef SPARSEQ_RNG_HPP
#define SPARSEQ_RNG_HPP

#include <cstdint>

namespace sparseq {

// Counter-based generator built on the SplitMix64 finalizer. Every draw is a
// pure function of (seed, stream, counter), so streams are independent and
// any draw can be reproduced in any language from the constants below
// (documented in docs/formats.md):
//
//   gamma  = 0x9E3779B97F4A7C15
//   mix(z) = { z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//              z ^= z >> 27; z *= 0x94D049BB133111EB;  return z ^ (z >> 31); }
//   key    = mix(mix(seed + gamma) + stream * gamma)
//   draw_i = mix(key + (i + 1) * gamma)          for i = 0, 1, 2, ...
//
// uniform01 maps a draw to ((draw >> 12) + 0.5) * 2^-52, which lies in the
// open interval (0,1); normal draws apply the inverse normal CDF to that.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static std::uint64_t mix(std::uint64_t z);

  // Draw at an explicit counter, independent of the internal cursor.
  std::uint64_t at(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform01();
  double uniform(double lo, double hi);
  double normal();

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  std::uint32_t uniform_int(std::uint32_t n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sparseq

#endif  // SPARSEQ_RNG_HPP
