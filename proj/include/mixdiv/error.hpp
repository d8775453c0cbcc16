// Copyright 2026 The mixdiv Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mixdiv {

enum class ErrorKind {
  NonPositiveWeight,
  LengthMismatch,
  NormalizationFailure,
  ZeroDensityAtom,
  DomainError,
  IndeterminateValue,
  InvalidParameter,
  SpaceMismatch,
  IndexOutOfRange,
  DegenerateExponent,
  NotProbabilitySpace,
  RenyiUndefined,
  LogOfZero,
  MixedConvexityTags,
  NonConcaveTag,
  BadOrdering,
  TagMismatch,
  RangeMismatch,
  NotC2Plus,
  UnsupportedFamily,
  SingularMatrix,
  InvalidSpec,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NormalizationFailure: return "NormalizationFailure";
    case ErrorKind::ZeroDensityAtom: return "ZeroDensityAtom";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::IndeterminateValue: return "IndeterminateValue";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateExponent: return "DegenerateExponent";
    case ErrorKind::NotProbabilitySpace: return "NotProbabilitySpace";
    case ErrorKind::RenyiUndefined: return "RenyiUndefined";
    case ErrorKind::LogOfZero: return "LogOfZero";
    case ErrorKind::MixedConvexityTags: return "MixedConvexityTags";
    case ErrorKind::NonConcaveTag: return "NonConcaveTag";
    case ErrorKind::BadOrdering: return "BadOrdering";
    case ErrorKind::TagMismatch: return "TagMismatch";
    case ErrorKind::RangeMismatch: return "RangeMismatch";
    case ErrorKind::NotC2Plus: return "NotC2Plus";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

/// Every failure raised by the library. `field()` is filled in by the
/// spec reader so that CLI errors can name the offending input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& field() const noexcept { return field_; }

  Error with_field(std::string field) const {
    Error copy = *this;
    if (copy.field_.empty()) {
      copy.field_ = std::move(field);
    } else {
      const char* sep = copy.field_.front() == '[' ? "" : ".";
      copy.field_ = std::move(field) + sep + copy.field_;
    }
    return copy;
  }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mixdiv
