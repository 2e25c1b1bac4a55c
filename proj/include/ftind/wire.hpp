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

#ifndef FTIND__WIRE_HPP_
#define FTIND__WIRE_HPP_

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ftind/types.hpp"

namespace ftind::wire
{

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes);

inline constexpr std::size_t kFrameSize = 34;
inline constexpr std::size_t kFramePayload = 32;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

struct RawFrame
{
  std::uint32_t seq = 0;
  std::uint32_t timestamp_us = 0;
  RawCounts channels{};
  std::uint16_t crc = 0;

  bool operator==(const RawFrame &) const = default;
};

/// Frame with its crc field filled in. ChannelOverflow if a channel is >= 2^28.
RawFrame make_frame(std::uint32_t seq, std::uint32_t timestamp_us, const RawCounts & channels);

/// Little endian: seq | timestamp | ch0..ch5 | crc over bytes 0..31. The crc
/// field of `f` is ignored and recomputed.
FrameBytes encode_frame(const RawFrame & f);

/// BadLength, then BadCrc, then ChannelOverflow.
RawFrame decode_frame(std::span<const std::uint8_t> bytes);

/// Log file header: "FTIND" 0x01, then the format version as u16 LE.
inline constexpr std::array<std::uint8_t, 6> kLogMagic = {'F', 'T', 'I', 'N', 'D', 0x01};
inline constexpr std::uint16_t kLogVersion = 1;
inline constexpr std::size_t kLogHeaderSize = 8;

void write_frame_log(std::ostream & os, std::span<const RawFrame> frames);
void write_frame_log(const std::filesystem::path & path, std::span<const RawFrame> frames);
/// BadMagic on a foreign header, BadLength on a trailing partial frame.
std::vector<RawFrame> read_frame_log(const std::filesystem::path & path);

/// Number of missing sequence numbers between consecutive frames.
std::uint64_t sequence_gaps(std::span<const RawFrame> frames);

/// seq = index, timestamp = t_us modulo 2^32.
std::vector<RawFrame> frames_from_dataset(const Dataset & data);

// ---------------------------------------------------------------------------
// CSV: t_us,fx,fy,fz,tx,ty,tz,ch0,...,ch5

inline constexpr std::array<std::string_view, 13> kDatasetColumns = {
  "t_us", "fx", "fy", "fz", "tx", "ty", "tz", "ch0", "ch1", "ch2", "ch3", "ch4", "ch5"};

void write_dataset_csv(std::ostream & os, const Dataset & data);
void write_dataset_csv(const std::filesystem::path & path, const Dataset & data);

struct CsvStats
{
  std::size_t rows = 0;
  std::array<double, kDatasetColumns.size()> min{};
  std::array<double, kDatasetColumns.size()> max{};
};

/// Streams the file row by row through `on_sample`; memory use does not grow
/// with the file. SchemaError (with line number) on a bad header or row
/// shape, ValueError on a cell that is not a number of the column's type.
CsvStats scan_dataset_csv(
  const std::filesystem::path & path, const std::function<void(const Sample &)> & on_sample);

struct Ingested
{
  Dataset data;
  CsvStats stats;
};

Ingested ingest_csv(const std::filesystem::path & path);

/// Timestamped wrench series: t_us,fx,fy,fz,tx,ty,tz.
struct TimedRow
{
  std::uint64_t t_us = 0;
  Wrench wrench;
  bool operator==(const TimedRow &) const = default;
};

void write_wrench_csv(std::ostream & os, std::span<const TimedRow> rows);
void write_wrench_csv(const std::filesystem::path & path, std::span<const TimedRow> rows);
std::vector<TimedRow> read_wrench_csv(const std::filesystem::path & path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Replay

inline constexpr double kMinReplayRateHz = 1.0;

struct ReplayOptions
{
  /// Frames buffered between the timing thread and the sink.
  std::size_t queue_capacity = 1024;
};

struct ReplayStats
{
  double requested_rate_hz = 0.0;
  double achieved_rate_hz = 0.0;
  double elapsed_s = 0.0;
  /// Largest deviation of an emission instant from its schedule.
  double max_jitter_us = 0.0;
  std::uint64_t emitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  /// Frames that reached the sink with a sequence number not above the last.
  std::uint64_t out_of_order = 0;
};

/// One timing thread emits frames on an absolute schedule into a bounded
/// queue; a second thread hands them to `sink`. A full queue drops its oldest
/// frame. RateError unless 1 <= rate_hz <= 4080.
ReplayStats replay(
  std::span<const RawFrame> frames, double rate_hz,
  const std::function<void(const RawFrame &)> & sink, const ReplayOptions & options = {});

}  // namespace ftind::wire

#endif  // FTIND__WIRE_HPP_
