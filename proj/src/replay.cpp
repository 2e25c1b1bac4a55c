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
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "ftind/error.hpp"
#include "ftind/wire.hpp"

namespace ftind::wire
{

namespace
{

// Single producer, single consumer; a full queue discards its oldest entry.
class DropOldestQueue
{
public:
  explicit DropOldestQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  void push(const RawFrame & f)
  {
    {
      std::lock_guard lock(mutex_);
      if (items_.size() == capacity_) {
        items_.pop_front();
        dropped_.fetch_add(1, std::memory_order_relaxed);
      }
      items_.push_back(f);
    }
    ready_.notify_one();
  }

  void close()
  {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_one();
  }

  /// False once closed and drained.
  bool pop(RawFrame & out)
  {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] {return !items_.empty() || closed_;});
    if (items_.empty()) {return false;}
    out = items_.front();
    items_.pop_front();
    return true;
  }

  std::uint64_t dropped() const {return dropped_.load(std::memory_order_relaxed);}

private:
  std::size_t capacity_;
  std::deque<RawFrame> items_;
  bool closed_ = false;
  std::mutex mutex_;
  std::condition_variable ready_;
  std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace

ReplayStats replay(
  std::span<const RawFrame> frames, double rate_hz,
  const std::function<void(const RawFrame &)> & sink, const ReplayOptions & options)
{
  if (!(rate_hz >= kMinReplayRateHz && rate_hz <= kMaxSampleRateHz)) {
    throw Error(
      ErrorCode::RateError, "replay rate must lie in [1, 4080] Hz, got " + format_double(rate_hz));
  }
  using Clock = std::chrono::steady_clock;
  const std::chrono::duration<double> period(1.0 / rate_hz);

  DropOldestQueue queue(options.queue_capacity);
  ReplayStats stats;
  stats.requested_rate_hz = rate_hz;

  std::uint64_t delivered = 0, out_of_order = 0;
  std::thread consumer([&] {
      RawFrame f;
      bool first = true;
      std::uint32_t last = 0;
      while (queue.pop(f)) {
        if (!first && f.seq <= last) {++out_of_order;}
        first = false;
        last = f.seq;
        sink(f);
        ++delivered;
      }
    });

  const auto start = Clock::now();
  auto slot = [&](std::size_t k) {
      return start + std::chrono::duration_cast<Clock::duration>(period * static_cast<double>(k));
    };
  double max_jitter = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto deadline = slot(k);
    std::this_thread::sleep_until(deadline);
    const auto late = std::chrono::duration<double, std::micro>(Clock::now() - deadline).count();
    max_jitter = std::max(max_jitter, late);
    queue.push(frames[k]);
  }
  // The run lasts until the last frame's slot closes.
  std::this_thread::sleep_until(slot(frames.size()));
  const auto end = Clock::now();
  queue.close();
  consumer.join();

  stats.elapsed_s = std::chrono::duration<double>(end - start).count();
  stats.emitted = frames.size();
  stats.achieved_rate_hz = stats.elapsed_s > 0.0 ?
    static_cast<double>(frames.size()) / stats.elapsed_s : 0.0;
  stats.max_jitter_us = max_jitter;
  stats.delivered = delivered;
  stats.dropped = queue.dropped();
  stats.out_of_order = out_of_order;
  return stats;
}

}  // namespace ftind::wire
