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

#include "fuzentra/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fuzentra/error.hpp"

namespace fuzentra::csv {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string("NA");
}

double parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::ParseError, "not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

std::optional<double> parse_optional(std::string_view text) {
  if (text == "NA") return std::nullopt;
  return parse_number(text);
}

Channels read_signal(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw Error(ErrorKind::ParseError, "empty signal file");
  const auto header = split(line);
  if (header.size() < 2 || header.front() != "time") {
    throw Error(ErrorKind::ParseError, "signal header must be 'time,<ch1>,...'");
  }
  const std::size_t channels = header.size() - 1;
  std::vector<double> times;
  std::vector<std::vector<double>> columns(channels);
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    times.push_back(parse_number(fields[0]));
    for (std::size_t c = 0; c < channels; ++c) columns[c].push_back(parse_number(fields[c + 1]));
  }
  if (times.size() < 2) {
    throw Error(ErrorKind::ParseError, "need at least two rows to infer the sample rate");
  }
  const double step = times[1] - times[0];
  if (!(step > 0.0)) throw Error(ErrorKind::ParseError, "time column must be strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double d = times[i] - times[i - 1];
    if (!(d > 0.0) || std::abs(d - step) > kTimeUniformityTolerance * step) {
      throw Error(ErrorKind::ParseError,
                  "non-uniform time step at row " + std::to_string(i + 1));
    }
  }
  double rate = 1.0 / step;
  // Written times are k / rate rounded to shortest form, so 1 / step is off by
  // an ulp or so; snap to the nearest micro-Hz value to recover the rate.
  const double snapped = std::round(rate * 1e6) / 1e6;
  if (std::abs(snapped - rate) <= 1e-9 * rate) rate = snapped;
  Channels out;
  out.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out.emplace_back(header[c + 1], TimeSeries(std::move(columns[c]), rate));
  }
  return out;
}

Channels read_signal(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_signal(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

MultiChannelEpoch read_epoch(const std::filesystem::path& path, Condition condition) {
  return MultiChannelEpoch(read_signal(path), condition);
}

void write_signal(std::ostream& out, const Channels& channels) {
  if (channels.empty()) throw Error(ErrorKind::InvalidArgument, "no channels to write");
  const auto& first = channels.front().second;
  std::string buf = "time";
  for (const auto& ch : channels) {
    if (ch.second.size() != first.size()) {
      throw Error(ErrorKind::LengthMismatch, "channels differ in length");
    }
    buf += ',';
    buf += ch.first;
  }
  buf += '\n';
  out << buf;
  for (std::size_t i = 0; i < first.size(); ++i) {
    buf.clear();
    buf += format_number(static_cast<double>(i) / first.sample_rate());
    for (const auto& ch : channels) {
      buf += ',';
      buf += format_number(ch.second[i]);
    }
    buf += '\n';
    out << buf;
  }
}

void write_signal(const std::filesystem::path& path, const Channels& channels) {
  auto out = open_out(path);
  write_signal(out, channels);
}

void write_epoch(const std::filesystem::path& path, const MultiChannelEpoch& epoch) {
  write_signal(path, epoch.channels());
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::ParseError, "missing column '" + std::string(name) + "'");
}

Table read_table(std::istream& in) {
  Table t;
  std::string line;
  if (!next_line(in, line)) throw Error(ErrorKind::ParseError, "empty table");
  t.header = split(line);
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size()) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

Table read_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_table(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

void write_table(std::ostream& out, const Table& table) {
  auto join = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  join(table.header);
  for (const auto& row : table.rows) join(row);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  write_table(out, table);
}

}  // namespace fuzentra::csv
