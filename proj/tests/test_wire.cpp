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

#include <atomic>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "ftind/error.hpp"
#include "ftind/synth.hpp"
#include "ftind/wire.hpp"

using namespace ftind;
using namespace ftind::wire;

namespace
{

ErrorCode code_of(auto && fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  FAIL("expected an ftind::Error");
  return ErrorCode::IoError;
}

// Bit-serial reference, deliberately unlike the table-driven codec.
std::uint16_t reference_crc(const std::uint8_t * p, std::size_t n)
{
  std::uint16_t crc = 0xFFFF;
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 7; b >= 0; --b) {
      const bool in = (p[i] >> b) & 1u;
      const bool top = (crc >> 15) & 1u;
      crc = static_cast<std::uint16_t>(crc << 1);
      if (in != top) {crc ^= 0x1021;}
    }
  }
  return crc;
}

RawFrame random_frame(std::mt19937_64 & g)
{
  RawCounts ch{};
  for (auto & c : ch) {c = static_cast<std::uint32_t>(g() & kMaxCount);}
  return make_frame(static_cast<std::uint32_t>(g()), static_cast<std::uint32_t>(g()), ch);
}

std::filesystem::path temp_file(const char * name)
{
  return std::filesystem::temp_directory_path() / (std::string("ftind_wire_") + name);
}

}  // namespace

TEST_CASE("crc check value")
{
  const std::string s = "123456789";
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t *>(s.data()), s.size());
  CHECK(crc16_ccitt_false(bytes) == 0x29B1);
  CHECK(reference_crc(bytes.data(), bytes.size()) == 0x29B1);
}

TEST_CASE("all-zero frame")
{
  const auto bytes = encode_frame(make_frame(0, 0, {}));
  for (std::size_t i = 0; i < kFramePayload; ++i) {CHECK(bytes[i] == 0);}
  const std::uint8_t zeros[32] = {};
  const std::uint16_t crc = reference_crc(zeros, 32);
  CHECK(bytes[32] == (crc & 0xFF));
  CHECK(bytes[33] == (crc >> 8));
}

TEST_CASE("field layout is little endian")
{
  const auto f = make_frame(0x04030201u, 0x08070605u, {0x0C0B0A09u, 0, 0, 0, 0, 0x0FFFFFFFu});
  const auto b = encode_frame(f);
  for (std::uint8_t i = 0; i < 12; ++i) {CHECK(b[i] == i + 1);}
  CHECK(b[28] == 0xFF);
  CHECK(b[31] == 0x0F);
  CHECK(decode_frame(b) == f);
}

TEST_CASE("random round trip and injectivity")
{
  std::mt19937_64 g(1);
  FrameBytes prev{};
  for (int k = 0; k < 20000; ++k) {
    const auto f = random_frame(g);
    const auto b = encode_frame(f);
    CHECK(b.size() == kFrameSize);
    REQUIRE(decode_frame(b) == f);
    CHECK(b != prev);
    prev = b;
  }
}

TEST_CASE("every single-bit error is detected")
{
  std::mt19937_64 g(2);
  const auto b = encode_frame(random_frame(g));
  for (std::size_t bit = 0; bit < 8 * kFrameSize; ++bit) {
    auto c = b;
    c[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK(code_of([&] {decode_frame(c);}) == ErrorCode::BadCrc);
  }
}

TEST_CASE("sampled double-bit errors are detected")
{
  std::mt19937_64 g(3);
  const auto b = encode_frame(random_frame(g));
  std::uniform_int_distribution<std::size_t> pick(0, 8 * kFrameSize - 1);
  int undetected = 0;
  for (int k = 0; k < 100000; ++k) {
    const auto i = pick(g);
    auto j = pick(g);
    while (j == i) {j = pick(g);}
    auto c = b;
    c[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
    c[j / 8] ^= static_cast<std::uint8_t>(1u << (j % 8));
    const std::uint16_t want = static_cast<std::uint16_t>(c[32] | (c[33] << 8));
    if (crc16_ccitt_false(std::span(c).first(kFramePayload)) == want) {++undetected;}
  }
  CHECK(undetected == 0);
}

TEST_CASE("length and overflow errors")
{
  const auto b = encode_frame(make_frame(1, 2, {}));
  CHECK(code_of([&] {decode_frame(std::span(b).first(33));}) == ErrorCode::BadLength);
  std::vector<std::uint8_t> longer(b.begin(), b.end());
  longer.push_back(0);
  CHECK(code_of([&] {decode_frame(longer);}) == ErrorCode::BadLength);

  CHECK(code_of([] {make_frame(0, 0, {0, 0, 1u << 28, 0, 0, 0});}) == ErrorCode::ChannelOverflow);
  RawFrame f;
  f.channels[5] = 1u << 28;
  CHECK(code_of([&] {encode_frame(f);}) == ErrorCode::ChannelOverflow);
  CHECK_NOTHROW(make_frame(0, 0, {kMaxCount, 0, 0, 0, 0, 0}));

  // A valid checksum over an overflowing channel still fails after the crc.
  FrameBytes raw{};
  raw[11] = 0x10;
  const auto crc = crc16_ccitt_false(std::span(raw).first(kFramePayload));
  raw[32] = static_cast<std::uint8_t>(crc & 0xFF);
  raw[33] = static_cast<std::uint8_t>(crc >> 8);
  CHECK(code_of([&] {decode_frame(raw);}) == ErrorCode::ChannelOverflow);
}

TEST_CASE("frame log")
{
  std::mt19937_64 g(4);
  std::vector<RawFrame> frames;
  for (std::uint32_t k = 0; k < 100; ++k) {
    auto f = random_frame(g);
    frames.push_back(make_frame(k < 50 ? k : k + 3, f.timestamp_us, f.channels));
  }
  const auto path = temp_file("log.bin");
  write_frame_log(path, frames);
  CHECK(std::filesystem::file_size(path) == kLogHeaderSize + 100 * kFrameSize);
  CHECK(read_frame_log(path) == frames);
  CHECK(sequence_gaps(frames) == 3);

  {
    std::ofstream os(path, std::ios::binary | std::ios::app);
    os.put('x');
  }
  CHECK(code_of([&] {read_frame_log(path);}) == ErrorCode::BadLength);
  std::ofstream(path, std::ios::binary) << "NOTALOGFILE";
  CHECK(code_of([&] {read_frame_log(path);}) == ErrorCode::BadMagic);
  CHECK(code_of([&] {read_frame_log(temp_file("absent.bin"));}) == ErrorCode::IoError);
  std::filesystem::remove(path);
}

TEST_CASE("dataset csv round trip")
{
  auto cfg = synth::default_config();
  cfg.noise.count_sigma = 3.0;
  const auto data = synth::generate_dataset(synth::demo_schedule(), cfg, 50.0, 5);
  const auto path = temp_file("data.csv");
  write_dataset_csv(path, data);
  const auto in = ingest_csv(path);
  CHECK(in.data == data);
  CHECK(in.stats.rows == data.size());
  double fz_max = -1e300;
  for (const auto & s : data) {fz_max = std::max(fz_max, s.wrench[2]);}
  CHECK(in.stats.max[3] == fz_max);

  std::size_t streamed = 0;
  scan_dataset_csv(path, [&](const Sample & s) {CHECK(s == data[streamed]); ++streamed;});
  CHECK(streamed == data.size());

  const auto frames = frames_from_dataset(data);
  CHECK(frames.size() == data.size());
  CHECK(frames[7].seq == 7);
  CHECK(frames[7].channels == data[7].counts);
  std::filesystem::remove(path);
}

TEST_CASE("dataset csv errors")
{
  const auto path = temp_file("bad.csv");
  std::ofstream(path) << "t_us,fx,fy,fz,tx,ty,tz,ch0,ch1,ch2,ch4,ch5\n0,0,0,0,0,0,0,1,2,3,4,5\n";
  try {
    ingest_csv(path);
    FAIL("expected SchemaError");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("ch3") != std::string::npos);
  }
  std::ofstream(path) << "t_us,fx,fy,fz,tx,ty,tz,ch0,ch1,ch2,ch3,ch4,ch5\n0,0,0,0,0,0,0,1,2,3,4,5\n";
  try {
    ingest_csv(path);
    FAIL("expected SchemaError");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::ofstream(path) << "t_us,fx,fy,fz,tx,ty,tz,ch0,ch1,ch2,ch3,ch4,ch5\n0,0,abc,0,0,0,0,1,2,3,4,5,6\n";
  CHECK(code_of([&] {ingest_csv(path);}) == ErrorCode::ValueError);
  std::ofstream(path) << "t_us,fx,fy,fz,tx,ty,tz,ch0,ch1,ch2,ch3,ch4,ch5\n0,0,0,0,0,0,0,1,2,3,4,5,268435456\n";
  CHECK(code_of([&] {ingest_csv(path);}) == ErrorCode::ValueError);
  std::filesystem::remove(path);
}

TEST_CASE("streaming ingest keeps a constant working set")
{
  // The callback sees each row once and nothing is retained by the scanner;
  // a 2e5-row file is enough to exercise the buffered path.
  const auto path = temp_file("big.csv");
  {
    std::ofstream os(path);
    os << "t_us,fx,fy,fz,tx,ty,tz,ch0,ch1,ch2,ch3,ch4,ch5\n";
    for (int k = 0; k < 200000; ++k) {os << k << ",1,2,3,4,5,6,1,2,3,4,5," << k << "\n";}
  }
  std::uint64_t sum = 0;
  const auto stats = scan_dataset_csv(path, [&](const Sample & s) {sum += s.counts[5];});
  CHECK(stats.rows == 200000);
  CHECK(sum == 199999ull * 200000ull / 2);
  std::filesystem::remove(path);
}

TEST_CASE("wrench csv and number formatting")
{
  std::vector<TimedRow> rows = {{0, {{0.1, -2.5e-7, 1780, 1.0 / 3.0, -0.0, 5e300}}}, {17, {}}};
  std::ostringstream os;
  write_wrench_csv(os, rows);
  CHECK(os.str().rfind("t_us,fx,fy,fz,tx,ty,tz\n", 0) == 0);
  const auto path = temp_file("w.csv");
  write_wrench_csv(path, rows);
  CHECK(read_wrench_csv(path) == rows);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::filesystem::remove(path);
}

TEST_CASE("replay rate bounds")
{
  const std::vector<RawFrame> frames(3);
  auto sink = [](const RawFrame &) {};
  CHECK(code_of([&] {replay(frames, 5000.0, sink);}) == ErrorCode::RateError);
  CHECK(code_of([&] {replay(frames, 0.5, sink);}) == ErrorCode::RateError);
  CHECK_NOTHROW(replay(frames, 4080.0, sink));
}

TEST_CASE("replay preserves order and reports drops under backpressure")
{
  std::vector<RawFrame> frames;
  for (std::uint32_t k = 0; k < 200; ++k) {frames.push_back(make_frame(k, k * 250, {}));}
  std::uint32_t last = 0;
  bool first = true, ordered = true;
  std::atomic<int> seen{0};
  ReplayOptions opt;
  opt.queue_capacity = 4;
  const auto stats = replay(frames, 4000.0, [&](const RawFrame & f) {
        if (!first && f.seq <= last) {ordered = false;}
        first = false;
        last = f.seq;
        ++seen;
        std::this_thread::sleep_for(std::chrono::microseconds(1000));
      }, opt);
  CHECK(ordered);
  CHECK(stats.out_of_order == 0);
  CHECK(stats.emitted == 200);
  CHECK(stats.delivered + stats.dropped == 200);
  CHECK(stats.dropped > 0);
  CHECK(stats.delivered == static_cast<std::uint64_t>(seen.load()));
  CHECK(last == 199);
}
