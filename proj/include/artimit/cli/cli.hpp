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

// The artimit command-line surface: one subcommand per pipeline stage.
// Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error.
// Failures print one line "<code>: <message>" on the error stream.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace artimit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

/// Shortest round-trip decimal with at least one fractional digit.
std::string FormatNumber(double value);

}  // namespace artimit::cli
