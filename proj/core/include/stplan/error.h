// Copyright 2026 The stplan Authors.
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

#ifndef STPLAN_ERROR_H_
#define STPLAN_ERROR_H_

#include <stdexcept>
#include <string>

namespace stplan {

/// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
  kValidation,  // malformed input, inconsistent configuration
  kIo,          // file could not be opened, read or written
  kInternal,    // an invariant the library itself should uphold was broken
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ValidationError(const std::string& message) {
  return Error(ErrorKind::kValidation, message);
}
inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}
inline Error InternalError(const std::string& message) {
  return Error(ErrorKind::kInternal, message);
}

}  // namespace stplan

#endif  // STPLAN_ERROR_H_
