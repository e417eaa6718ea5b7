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

#include "event.hpp"

#include "error.hpp"

#include <string>

namespace sel {

HistoryWindow::HistoryWindow(int capacity) : capacity_(capacity) {
    if (capacity < 1) fail(ErrorCode::config, "window capacity must be >= 1");
    slots_.resize(static_cast<std::size_t>(capacity));
}

std::int64_t HistoryWindow::newest_t() const {
    if (count_ == 0) fail(ErrorCode::history, "window is empty");
    return back(0).t;
}

const TimestepFrame &HistoryWindow::back(int steps) const {
    if (steps < 0 || static_cast<std::size_t>(steps) >= count_)
        fail(ErrorCode::history,
             "window holds " + std::to_string(count_) +
                 " frames, requested offset " + std::to_string(steps));
    std::size_t idx =
        (head_ + count_ - 1 - static_cast<std::size_t>(steps)) %
        slots_.size();
    return slots_[idx];
}

void HistoryWindow::push(TimestepFrame frame) {
    if (count_ > 0) {
        std::int64_t expected = back(0).t + 1;
        if (frame.t != expected)
            fail(ErrorCode::gap, "expected timestep " +
                                     std::to_string(expected) + ", got " +
                                     std::to_string(frame.t));
        if (frame.size() != back(0).size())
            fail(ErrorCode::bounds, "frame size " +
                                        std::to_string(frame.size()) +
                                        " does not match window layer size " +
                                        std::to_string(back(0).size()));
    }
    std::size_t slot = (head_ + count_) % slots_.size();
    slots_[slot] = std::move(frame);
    if (static_cast<int>(count_) == capacity_) {
        head_ = (head_ + 1) % slots_.size();
    } else {
        ++count_;
    }
}

void HistoryWindow::fill_zero(std::size_t layer_size, std::int64_t t0) {
    clear();
    for (int i = 0; i < capacity_; ++i)
        push(TimestepFrame(t0 - capacity_ + i, layer_size));
}

void HistoryWindow::clear() {
    head_ = 0;
    count_ = 0;
}

std::vector<TimestepFrame> bin_events(std::span<const Event> events,
                                      std::int64_t tau_us, int layer_size,
                                      std::int64_t t0_us) {
    if (tau_us <= 0) fail(ErrorCode::config, "tau_us must be positive");
    if (layer_size < 1) fail(ErrorCode::config, "layer_size must be >= 1");

    std::vector<TimestepFrame> frames;
    std::int64_t prev_t = t0_us;
    for (std::size_t n = 0; n < events.size(); ++n) {
        const Event &e = events[n];
        if (e.t_us < prev_t)
            fail(ErrorCode::ordering,
                 "event " + std::to_string(n) + " at t=" +
                     std::to_string(e.t_us) + "us precedes t=" +
                     std::to_string(prev_t) + "us");
        prev_t = e.t_us;
        if (e.neuron < 0 || e.neuron >= layer_size)
            fail(ErrorCode::bounds,
                 "event " + std::to_string(n) + " neuron index " +
                     std::to_string(e.neuron) + " outside layer of size " +
                     std::to_string(layer_size));
        if (e.strength < 0.0)
            fail(ErrorCode::numeric, "event strength must be non-negative");

        std::int64_t bin = (e.t_us - t0_us) / tau_us;
        while (static_cast<std::int64_t>(frames.size()) <= bin)
            frames.emplace_back(static_cast<std::int64_t>(frames.size()),
                                static_cast<std::size_t>(layer_size));
        frames[static_cast<std::size_t>(bin)]
            .values[static_cast<std::size_t>(e.neuron)] += e.strength;
    }
    return frames;
}

} // namespace sel
