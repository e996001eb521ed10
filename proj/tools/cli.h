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

#ifndef STPLAN_TOOLS_CLI_H_
#define STPLAN_TOOLS_CLI_H_

#include <iosfwd>

namespace stplan::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kIoFailure = 2;
inline constexpr int kInternalFailure = 3;

/// Runs one invocation. Summaries go to `out`; logs and the JSON error
/// object go to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stplan::cli

#endif  // STPLAN_TOOLS_CLI_H_
