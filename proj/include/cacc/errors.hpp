/*
 * Copyright 2026 The resilient-cacc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cacc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square input, length mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scenario or estimator configuration violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The observer-gain linear program has no usable optimum.
class SynthesisError : public Error {
 public:
  enum class Kind { kInfeasible, kUnbounded, kInternal };

  SynthesisError(Kind kind, const std::string& what, std::vector<std::size_t> rows = {})
      : Error(what), kind_(kind), rows_(std::move(rows)) {}

  Kind kind() const noexcept { return kind_; }
  /// Constraint rows still violated when phase one stopped (infeasible case).
  const std::vector<std::size_t>& violated_rows() const noexcept { return rows_; }

 private:
  Kind kind_;
  std::vector<std::size_t> rows_;
};

/// Recovered lower framer exceeds the upper framer.
class FramerViolation : public Error {
 public:
  using Error::Error;
};

/// A simulated state became NaN or infinite.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

}  // namespace cacc
