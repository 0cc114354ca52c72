/*
 * Copyright 2026 The fuzentra Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fuzentra {

// Every failure raised by the library carries one of these kinds so callers
// (the CLI in particular) can map it to an exit code without string matching.
enum class ErrorKind {
  InvalidArgument,  // precondition violation not covered by a named kind
  DegenerateSignal,
  InvalidBand,
  TooShort,
  ConstantSignal,
  AllComponentsRejected,
  ScaleMismatch,
  EmptySet,
  HarmonicAboveNyquist,
  SingularCovariance,
  InsufficientComponents,
  DegenerateVariance,
  LengthMismatch,
  SingleClass,
  TooFewExamples,
  DimensionMismatch,
  MissingEpoch,
  LayoutError,
  ParseError,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace fuzentra
