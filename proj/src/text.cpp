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

#include "sparseq/text.hpp"

#include <charconv>

namespace sparseq {
namespace {

template <typename T>
std::string shortest(T value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;  // 64 bytes always suffice for binary32/binary64 shortest form
  return std::string(buf, end);
}

}  // namespace

std::string format_float(float value) { return shortest(value); }

std::string format_double(double value) { return shortest(value); }

}  // namespace sparseq
