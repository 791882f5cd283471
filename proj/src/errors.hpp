// Copyright 2026 The Intentsynth Authors
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

#ifndef INTENTSYNTH_ERRORS_HPP
#define INTENTSYNTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace intentsynth {

// Error taxonomy shared across the library. The C API and the CLI map these
// onto status/exit codes, so every throw site picks the kind deliberately.
enum class ErrorKind {
  Io,           // missing files, unreadable paths, failed writes
  Parse,        // malformed JSON/JSONL
  Schema,       // well-formed input that violates the expected data layout
  Argument,     // bad arguments or configuration (usage errors)
  Consistency,  // cross-object violations (plan vs corpus, intent mismatches)
  Capability,   // a backend lacks a required capability
  Template,     // prompt template problems
  Backend,      // a backend call failed
  Dependency,   // a pipeline stage ran before its inputs exist
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Template: return "template";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::Dependency: return "dependency";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace intentsynth

#endif  // INTENTSYNTH_ERRORS_HPP
