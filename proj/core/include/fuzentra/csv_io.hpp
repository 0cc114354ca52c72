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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuzentra/time_series.hpp"

// Signal CSV format:
//
//   time,<ch1>,<ch2>,...
//   0,1.25,-3.5,...
//   0.004,...
//
// Comma separated, '.' decimal point, '\n' line terminator. The time column
// must be strictly increasing and uniform; the sample rate is inferred from
// the first two rows and every later step must agree to 1e-6 relative.
// Numbers are written in shortest round-trip form so a write/read cycle
// reproduces every sample bit for bit.
namespace fuzentra::csv {

using Channels = std::vector<MultiChannelEpoch::Channel>;

inline constexpr double kTimeUniformityTolerance = 1e-6;

Channels read_signal(std::istream& in);
Channels read_signal(const std::filesystem::path& path);

MultiChannelEpoch read_epoch(const std::filesystem::path& path, Condition condition);

void write_signal(std::ostream& out, const Channels& channels);
void write_signal(const std::filesystem::path& path, const Channels& channels);
void write_epoch(const std::filesystem::path& path, const MultiChannelEpoch& epoch);

// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);  // "NA" when empty
double parse_number(std::string_view text);
std::optional<double> parse_optional(std::string_view text);

// Plain comma-separated table with a header row. No quoting support: fields
// never contain commas in any format this library reads or writes.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws ParseError
};

Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);
void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& path, const Table& table);

std::vector<std::string> split(std::string_view line, char sep = ',');

}  // namespace fuzentra::csv
