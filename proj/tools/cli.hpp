// Copyright 2026 The GestureQA Authors
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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gestureqa::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

// Applies `dotted.key=value` to `config`. The value is parsed as JSON when
// it parses, otherwise taken as a string. Intermediate objects are created.
// Throws ConfigError on a malformed assignment.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Rejects top-level sections outside `allowed` with ConfigError.
void check_sections(const nlohmann::json& config, const std::vector<std::string>& allowed);

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gestureqa::cli
