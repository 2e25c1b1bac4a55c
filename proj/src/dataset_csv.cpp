// Copyright 2026 The ftind Authors
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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string_view>

#include "ftind/error.hpp"
#include "ftind/wire.hpp"

namespace ftind::wire
{

namespace
{

constexpr std::array<std::string_view, 7> kWrenchColumns = {
  "t_us", "fx", "fy", "fz", "tx", "ty", "tz"};

// Splits on commas into `out`; returns the field count (capped at out.size() + 1).
std::size_t split(std::string_view line, std::span<std::string_view> out)
{
  std::size_t n = 0;
  while (true) {
    const auto comma = line.find(',');
    if (n < out.size()) {out[n] = line.substr(0, comma);}
    ++n;
    if (comma == std::string_view::npos || n > out.size()) {break;}
    line.remove_prefix(comma + 1);
  }
  return n;
}

std::string_view trim_cr(std::string_view s)
{
  if (!s.empty() && s.back() == '\r') {s.remove_suffix(1);}
  return s;
}

template<typename T>
T parse_cell(std::string_view cell, std::size_t line, std::string_view column)
{
  T v{};
  const auto * end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    throw Error(
      ErrorCode::ValueError, "line " + std::to_string(line) + ", column " +
      std::string(column) + ": '" + std::string(cell) + "' is not a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) {
      throw Error(
        ErrorCode::ValueError, "line " + std::to_string(line) + ", column " +
        std::string(column) + ": non-finite value");
    }
  }
  return v;
}

template<std::size_t N>
void check_header(
  std::string_view header, const std::array<std::string_view, N> & expected,
  const std::filesystem::path & path)
{
  std::array<std::string_view, N> got{};
  const std::size_t n = split(trim_cr(header), got);
  for (std::size_t k = 0; k < N; ++k) {
    if (k >= n || got[k] != expected[k]) {
      throw Error(
        ErrorCode::SchemaError, path.string() + " line 1: expected column '" +
        std::string(expected[k]) + "' at position " + std::to_string(k + 1));
    }
  }
  if (n > N) {
    throw Error(ErrorCode::SchemaError, path.string() + " line 1: unexpected extra columns");
  }
}

std::ifstream open_in(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  return is;
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {throw Error(ErrorCode::IoError, "cannot write " + path.string());}
  return os;
}

}  // namespace

std::string format_double(double v)
{
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_dataset_csv(std::ostream & os, const Dataset & data)
{
  for (std::size_t k = 0; k < kDatasetColumns.size(); ++k) {
    os << (k ? "," : "") << kDatasetColumns[k];
  }
  os << '\n';
  for (const auto & s : data) {
    os << s.t_us;
    for (std::size_t a = 0; a < kAxes; ++a) {os << ',' << format_double(s.wrench[a]);}
    for (std::size_t i = 0; i < kChannels; ++i) {os << ',' << s.counts[i];}
    os << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path & path, const Dataset & data)
{
  auto os = open_out(path);
  write_dataset_csv(os, data);
  if (!os) {throw Error(ErrorCode::IoError, "write failed for " + path.string());}
}

CsvStats scan_dataset_csv(
  const std::filesystem::path & path, const std::function<void(const Sample &)> & on_sample)
{
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) {
    throw Error(ErrorCode::SchemaError, path.string() + " line 1: missing header");
  }
  check_header(line, kDatasetColumns, path);

  CsvStats stats;
  stats.min.fill(INFINITY);
  stats.max.fill(-INFINITY);
  std::array<std::string_view, kDatasetColumns.size()> cells{};
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim_cr(line);
    if (text.empty()) {continue;}
    if (split(text, cells) != cells.size()) {
      throw Error(
        ErrorCode::SchemaError, path.string() + " line " + std::to_string(line_no) +
        ": expected " + std::to_string(cells.size()) + " fields");
    }
    Sample s;
    s.t_us = parse_cell<std::uint64_t>(cells[0], line_no, kDatasetColumns[0]);
    for (std::size_t a = 0; a < kAxes; ++a) {
      s.wrench[a] = parse_cell<double>(cells[1 + a], line_no, kDatasetColumns[1 + a]);
    }
    for (std::size_t i = 0; i < kChannels; ++i) {
      const auto v = parse_cell<std::uint32_t>(cells[7 + i], line_no, kDatasetColumns[7 + i]);
      if (v > kMaxCount) {
        throw Error(
          ErrorCode::ValueError, "line " + std::to_string(line_no) + ", column " +
          std::string(kDatasetColumns[7 + i]) + ": exceeds 28 bits");
      }
      s.counts[i] = v;
    }
    std::array<double, kDatasetColumns.size()> row{};
    row[0] = static_cast<double>(s.t_us);
    for (std::size_t a = 0; a < kAxes; ++a) {row[1 + a] = s.wrench[a];}
    for (std::size_t i = 0; i < kChannels; ++i) {row[7 + i] = s.counts[i];}
    for (std::size_t c = 0; c < row.size(); ++c) {
      stats.min[c] = std::min(stats.min[c], row[c]);
      stats.max[c] = std::max(stats.max[c], row[c]);
    }
    ++stats.rows;
    on_sample(s);
  }
  return stats;
}

Ingested ingest_csv(const std::filesystem::path & path)
{
  Ingested out;
  out.stats = scan_dataset_csv(path, [&](const Sample & s) {out.data.push_back(s);});
  return out;
}

void write_wrench_csv(std::ostream & os, std::span<const TimedRow> rows)
{
  for (std::size_t k = 0; k < kWrenchColumns.size(); ++k) {
    os << (k ? "," : "") << kWrenchColumns[k];
  }
  os << '\n';
  for (const auto & r : rows) {
    os << r.t_us;
    for (std::size_t a = 0; a < kAxes; ++a) {os << ',' << format_double(r.wrench[a]);}
    os << '\n';
  }
}

void write_wrench_csv(const std::filesystem::path & path, std::span<const TimedRow> rows)
{
  auto os = open_out(path);
  write_wrench_csv(os, rows);
  if (!os) {throw Error(ErrorCode::IoError, "write failed for " + path.string());}
}

std::vector<TimedRow> read_wrench_csv(const std::filesystem::path & path)
{
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) {
    throw Error(ErrorCode::SchemaError, path.string() + " line 1: missing header");
  }
  check_header(line, kWrenchColumns, path);
  std::vector<TimedRow> rows;
  std::array<std::string_view, kWrenchColumns.size()> cells{};
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim_cr(line);
    if (text.empty()) {continue;}
    if (split(text, cells) != cells.size()) {
      throw Error(
        ErrorCode::SchemaError, path.string() + " line " + std::to_string(line_no) +
        ": expected " + std::to_string(cells.size()) + " fields");
    }
    TimedRow r;
    r.t_us = parse_cell<std::uint64_t>(cells[0], line_no, kWrenchColumns[0]);
    for (std::size_t a = 0; a < kAxes; ++a) {
      r.wrench[a] = parse_cell<double>(cells[1 + a], line_no, kWrenchColumns[1 + a]);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ftind::wire
