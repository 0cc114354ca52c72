/*
 * Copyright 2026 The fuzentra Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Flat `key = value` text files. Blank lines and lines starting with '#'
// are ignored; whitespace around keys and values is trimmed. Every problem
// is reported as ConfigError with the offending line.
namespace fuzentra::config {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::vector<Entry> parse(std::istream& in);  // rejects duplicate keys
std::vector<Entry> load(const std::filesystem::path& path);

double to_double(const Entry& e);
std::size_t to_size(const Entry& e);
std::uint64_t to_u64(const Entry& e);
bool to_bool(const Entry& e);  // true|false|1|0
std::vector<std::size_t> to_size_list(const Entry& e);  // comma separated

[[noreturn]] void unknown_key(const Entry& e);

}  // namespace fuzentra::config
