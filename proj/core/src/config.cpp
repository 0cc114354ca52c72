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

#include "fuzentra/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "fuzentra/error.hpp"

namespace fuzentra::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const Entry& e, std::string_view expected) {
  throw Error(ErrorKind::ConfigError, "line " + std::to_string(e.line) + ": '" + e.key +
                                          "' expects " + std::string(expected) + ", got '" +
                                          e.value + "'");
}

template <typename T>
T parse_integer(const Entry& e) {
  T out{};
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(e, "a non-negative integer");
  return out;
}

}  // namespace

std::vector<Entry> parse(std::istream& in) {
  std::vector<Entry> out;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError,
                  "line " + std::to_string(line) + ": expected 'key = value'");
    }
    Entry e{std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))), line};
    if (e.key.empty()) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": empty key");
    }
    if (!seen.insert(e.key).second) {
      throw Error(ErrorKind::ConfigError,
                  "line " + std::to_string(line) + ": duplicate key '" + e.key + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Entry> load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path.string());
  return parse(in);
}

double to_double(const Entry& e) {
  double out = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) bad_value(e, "a finite number");
  return out;
}

std::size_t to_size(const Entry& e) { return parse_integer<std::size_t>(e); }

std::uint64_t to_u64(const Entry& e) { return parse_integer<std::uint64_t>(e); }

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  bad_value(e, "true or false");
}

std::vector<std::size_t> to_size_list(const Entry& e) {
  std::vector<std::size_t> out;
  std::string_view rest = e.value;
  while (true) {
    const auto comma = rest.find(',');
    Entry item{e.key, std::string(trim(rest.substr(0, comma))), e.line};
    out.push_back(to_size(item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void unknown_key(const Entry& e) {
  throw Error(ErrorKind::ConfigError,
              "line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
}

}  // namespace fuzentra::config
