#pragma once

#include <span>

namespace pintoc {

enum class CountMode { serial_sum, parallel_max };

/// Counts implicit-Euler linear-system applications. In parallel_max mode a
/// concurrent batch contributes only the largest per-worker count, so the
/// counter reflects the critical path rather than total work.
class OpCounter {
 public:
  explicit OpCounter(CountMode mode = CountMode::serial_sum) : mode_(mode) {}

  CountMode mode() const { return mode_; }
  long linear_solves() const { return count_; }

  void add(long n) { count_ += n; }

  /// Merge a batch of per-worker counters executed concurrently.
  void absorb_batch(std::span<const OpCounter> batch) {
    long total = 0, peak = 0;
    for (const auto& c : batch) {
      total += c.linear_solves();
      if (c.linear_solves() > peak) peak = c.linear_solves();
    }
    count_ += (mode_ == CountMode::serial_sum) ? total : peak;
  }

 private:
  CountMode mode_;
  long count_ = 0;
};

/// Serial-sum and parallel-counted-once accounting kept side by side.
struct CounterPair {
  OpCounter serial{CountMode::serial_sum};
  OpCounter parallel{CountMode::parallel_max};

  void add_serial_work(long n) {
    serial.add(n);
    parallel.add(n);
  }
  void absorb_batch(std::span<const OpCounter> batch) {
    serial.absorb_batch(batch);
    parallel.absorb_batch(batch);
  }
};

}  // namespace pintoc
