// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stfact {

enum class ErrorKind {
  kConfig,                 // bad configuration or CLI usage
  kInput,                  // unreadable or malformed input file
  kCorpusCorrupt,          // too many malformed review lines
  kIncompatibleBenchmark,  // schema_version mismatch
  kIdJoinFailure,          // too many generated ids missing from the benchmark
  kEmptyStatement,
  kInvalidSentiment,
  kEmptyInput,
  kPrecondition,
  kElicitationIncomplete,
  kUndefinedCorrelation,
  kBackendUnavailable,
  kHttpStatus,
  kBackendProtocol,  // reply parsed but does not follow the wire schema
  kInvariant,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// CLI exit code for an error class: 1 config, 2 input, 3 backend, 4 internal.
int exit_code_for(ErrorKind kind);

}  // namespace stfact
