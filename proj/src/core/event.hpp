/*
 * Copyright 2026 The SEL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Discrete-time spike representation: events, per-timestep frames and
// ring-buffered activity histories.

#ifndef SEL_CORE_EVENT_HPP
#define SEL_CORE_EVENT_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace sel {

// One spike occurrence of a neuron. A real-valued strength stands for a
// sum of simultaneous unit spikes; strengths within a timestep bin add.
struct Event {
    std::int32_t neuron = 0;
    std::int64_t t_us = 0;
    double strength = 1.0;
};

// Dense vector of non-negative spike strengths of one layer at one
// discrete timestep of width tau.
struct TimestepFrame {
    std::int64_t t = 0;
    std::vector<double> values;

    TimestepFrame() = default;
    TimestepFrame(std::int64_t timestep, std::size_t size)
        : t(timestep), values(size, 0.0) {}

    std::size_t size() const { return values.size(); }
};

// Ring of the most recent frames of a layer, consecutive in t.
class HistoryWindow {
public:
    explicit HistoryWindow(int capacity);

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(count_); }
    bool empty() const { return count_ == 0; }
    bool filled() const { return static_cast<int>(count_) == capacity_; }

    std::int64_t newest_t() const;

    // Frame `steps` before the newest one; back(0) is the newest.
    const TimestepFrame &back(int steps) const;

    // Appends the next frame. The timestep must be exactly newest_t()+1
    // (any frame is accepted when empty); evicts the oldest at capacity.
    void push(TimestepFrame frame);

    // Pre-loads the ring with `capacity` zero frames so the window is
    // filled at timestep t0-1, i.e. silence is assumed before the stream.
    void fill_zero(std::size_t layer_size, std::int64_t t0);

    void clear();

private:
    int capacity_;
    std::size_t head_ = 0; // slot of the oldest frame
    std::size_t count_ = 0;
    std::vector<TimestepFrame> slots_;
};

// Sums event strengths into half-open timestep bins
// [t0 + b*tau, t0 + (b+1)*tau). Events must be ordered and pre-mapped to
// neuron indices below layer_size. Interior empty bins come out as zero
// frames; the sequence ends at the bin of the last event.
std::vector<TimestepFrame> bin_events(std::span<const Event> events,
                                      std::int64_t tau_us, int layer_size,
                                      std::int64_t t0_us);

} // namespace sel

#endif
