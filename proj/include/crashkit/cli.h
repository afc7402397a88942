/*
 * Copyright 2026 The Crashkit Authors.
 *
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

#ifndef CRASHKIT_CLI_H_
#define CRASHKIT_CLI_H_

#include <string>
#include <string_view>
#include <vector>

namespace crashkit::cli {

inline constexpr std::string_view kToolName = "crashkit";
inline constexpr std::string_view kToolVersion = "1.0.0";

// Environment variables read for secrets; nothing else comes from the
// environment.
inline constexpr const char* kApiKeyEnv = "CRASHKIT_API_KEY";
inline constexpr const char* kMapsKeyEnv = "CRASHKIT_MAPS_KEY";

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args[0]` is the program name. Errors are written to
// standard error as "error: <E_CODE>: <message>".
int run(const std::vector<std::string>& args);

}  // namespace crashkit::cli

#endif  // CRASHKIT_CLI_H_
