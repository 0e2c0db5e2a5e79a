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

#ifndef SPARSEQ_ERRORS_HPP
#define SPARSEQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sparseq {

// Base class for all sparseq errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unrecognized magic bytes or an unparseable header.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File or payload does not match the sizes announced by its header.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// A domain invariant was violated (non-positive label height, duplicate
// label pixel, out-of-grid index, dimension mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Missing channels, unknown keys, or otherwise unusable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Underlying filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Optimization diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparseq

#endif  // SPARSEQ_ERRORS_HPP
