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
#include <fstream>
#include <iterator>

#include "ftind/error.hpp"
#include "ftind/wire.hpp"

namespace ftind::wire
{

namespace
{

void put_u32(std::uint8_t * p, std::uint32_t v)
{
  for (int k = 0; k < 4; ++k) {p[k] = static_cast<std::uint8_t>(v >> (8 * k));}
}

std::uint32_t get_u32(const std::uint8_t * p)
{
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) {v = (v << 8) | p[k];}
  return v;
}

void check_channels(const RawCounts & ch)
{
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch[i] > kMaxCount) {
      throw Error(ErrorCode::ChannelOverflow, "channel " + std::to_string(i) + " exceeds 28 bits");
    }
  }
}

}  // namespace

RawFrame make_frame(std::uint32_t seq, std::uint32_t timestamp_us, const RawCounts & channels)
{
  RawFrame f{seq, timestamp_us, channels, 0};
  const auto bytes = encode_frame(f);
  f.crc = static_cast<std::uint16_t>(bytes[32] | (bytes[33] << 8));
  return f;
}

FrameBytes encode_frame(const RawFrame & f)
{
  check_channels(f.channels);
  FrameBytes b{};
  put_u32(b.data(), f.seq);
  put_u32(b.data() + 4, f.timestamp_us);
  for (std::size_t i = 0; i < kChannels; ++i) {put_u32(b.data() + 8 + 4 * i, f.channels[i]);}
  const auto crc = crc16_ccitt_false(std::span(b.data(), kFramePayload));
  b[32] = static_cast<std::uint8_t>(crc & 0xFFu);
  b[33] = static_cast<std::uint8_t>(crc >> 8);
  return b;
}

RawFrame decode_frame(std::span<const std::uint8_t> b)
{
  if (b.size() != kFrameSize) {
    throw Error(ErrorCode::BadLength, "frame has " + std::to_string(b.size()) + " bytes");
  }
  const auto crc = static_cast<std::uint16_t>(b[32] | (b[33] << 8));
  if (crc != crc16_ccitt_false(b.first(kFramePayload))) {
    throw Error(ErrorCode::BadCrc, "frame checksum mismatch");
  }
  RawFrame f;
  f.seq = get_u32(b.data());
  f.timestamp_us = get_u32(b.data() + 4);
  for (std::size_t i = 0; i < kChannels; ++i) {f.channels[i] = get_u32(b.data() + 8 + 4 * i);}
  f.crc = crc;
  check_channels(f.channels);
  return f;
}

void write_frame_log(std::ostream & os, std::span<const RawFrame> frames)
{
  std::array<char, kLogHeaderSize> header{};
  std::copy(kLogMagic.begin(), kLogMagic.end(), header.begin());
  header[6] = static_cast<char>(kLogVersion & 0xFFu);
  header[7] = static_cast<char>(kLogVersion >> 8);
  os.write(header.data(), header.size());
  for (const auto & f : frames) {
    const auto b = encode_frame(f);
    os.write(reinterpret_cast<const char *>(b.data()), b.size());
  }
}

void write_frame_log(const std::filesystem::path & path, std::span<const RawFrame> frames)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {throw Error(ErrorCode::IoError, "cannot write " + path.string());}
  write_frame_log(os, frames);
  if (!os) {throw Error(ErrorCode::IoError, "write failed for " + path.string());}
}

std::vector<RawFrame> read_frame_log(const std::filesystem::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  std::array<std::uint8_t, kLogHeaderSize> header{};
  is.read(reinterpret_cast<char *>(header.data()), header.size());
  if (is.gcount() != static_cast<std::streamsize>(header.size()) ||
    !std::equal(kLogMagic.begin(), kLogMagic.end(), header.begin()))
  {
    throw Error(ErrorCode::BadMagic, path.string() + " is not a frame log");
  }
  const auto version = static_cast<std::uint16_t>(header[6] | (header[7] << 8));
  if (version != kLogVersion) {
    throw Error(ErrorCode::BadMagic, "unsupported frame log version " + std::to_string(version));
  }
  std::vector<RawFrame> frames;
  FrameBytes b{};
  while (true) {
    is.read(reinterpret_cast<char *>(b.data()), b.size());
    const auto got = is.gcount();
    if (got == 0) {break;}
    if (got != static_cast<std::streamsize>(b.size())) {
      throw Error(ErrorCode::BadLength, "trailing partial frame in " + path.string());
    }
    frames.push_back(decode_frame(b));
  }
  return frames;
}

std::uint64_t sequence_gaps(std::span<const RawFrame> frames)
{
  std::uint64_t gaps = 0;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const std::uint32_t step = frames[k].seq - frames[k - 1].seq;
    if (step > 1) {gaps += step - 1;}
  }
  return gaps;
}

std::vector<RawFrame> frames_from_dataset(const Dataset & data)
{
  std::vector<RawFrame> out;
  out.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    out.push_back(make_frame(
      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(data[k].t_us), data[k].counts));
  }
  return out;
}

}  // namespace ftind::wire
