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

#include <array>

#include "ftind/wire.hpp"

namespace ftind::wire
{

namespace
{

constexpr std::array<std::uint16_t, 256> make_table()
{
  std::array<std::uint16_t, 256> t{};
  for (std::uint32_t b = 0; b < 256; ++b) {
    std::uint16_t r = static_cast<std::uint16_t>(b << 8);
    for (int k = 0; k < 8; ++k) {
      r = static_cast<std::uint16_t>((r & 0x8000u) ? (r << 1) ^ 0x1021u : r << 1);
    }
    t[b] = r;
  }
  return t;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes)
{
  std::uint16_t crc = 0xFFFF;
  for (const auto b : bytes) {
    crc = static_cast<std::uint16_t>((crc << 8) ^ kTable[((crc >> 8) ^ b) & 0xFFu]);
  }
  return crc;
}

}  // namespace ftind::wire
