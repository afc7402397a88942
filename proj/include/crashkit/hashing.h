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

#ifndef CRASHKIT_HASHING_H_
#define CRASHKIT_HASHING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace crashkit {

// 64-bit FNV-1a. Used for template/dictionary versions and manifest input
// hashes; not a cryptographic digest.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);
std::string hash_text(std::string_view bytes);
std::string hash_file(const std::filesystem::path& path);  // throws kIo

std::string read_file(const std::filesystem::path& path);  // throws kIo
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace crashkit

#endif  // CRASHKIT_HASHING_H_
