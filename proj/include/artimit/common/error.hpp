// Copyright 2026 The artimit Authors.
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

namespace artimit {

/// Failure categories. Every error raised by the library carries one of these
/// so that callers (and the CLI) can report a stable machine-readable code.
enum class ErrorKind {
  kDimension,
  kNumeric,
  kEmptySequence,
  kState,
  kContract,
  kInputTooShort,
  kNormalization,
  kDomain,
  kConfig,
  kDivergence,
  kFormat,
  kUnsupportedFormat,
  kParse,
  kSchema,
  kDegenerateStage,
  kUnsupportedRate,
  kUndefinedCorrelation,
  kMissingItem,
  kLabelCoverage,
  kUndefinedWer,
  kIo,
  kUsage,
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kEmptySequence: return "empty_sequence";
    case ErrorKind::kState: return "state";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kInputTooShort: return "input_too_short";
    case ErrorKind::kNormalization: return "normalization";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupportedFormat: return "unsupported_format";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDegenerateStage: return "degenerate_stage";
    case ErrorKind::kUnsupportedRate: return "unsupported_rate";
    case ErrorKind::kUndefinedCorrelation: return "undefined_correlation";
    case ErrorKind::kMissingItem: return "missing_item";
    case ErrorKind::kLabelCoverage: return "label_coverage";
    case ErrorKind::kUndefinedWer: return "undefined_wer";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  std::string_view code() const { return ErrorKindName(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace artimit
