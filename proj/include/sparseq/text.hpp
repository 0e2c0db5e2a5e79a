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

#ifndef SPARSEQ_TEXT_HPP
#define SPARSEQ_TEXT_HPP

#include <string>

namespace sparseq {

// Shortest decimal representation that round-trips the value, '.' separator,
// locale-independent. Used everywhere a float lands in a text artifact so
// files are bit-stable across runs.
std::string format_float(float value);
std::string format_double(double value);

}  // namespace sparseq

#endif  // SPARSEQ_TEXT_HPP
