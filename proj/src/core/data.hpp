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

// Event-data ingestion: canonical DVS-style event files, sensor-to-neuron
// mapping, recording assembly into labeled frame streams, and the
// synthetic moving-pattern generator used for desk-scale runs.

#ifndef SEL_CORE_DATA_HPP
#define SEL_CORE_DATA_HPP

#include "event.hpp"
#include "rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sel {

// Raw sensor event: pixel coordinates, microsecond timestamp and the
// polarity of the intensity change (1 = ON, 0 = OFF).
struct SensorEvent {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int64_t t_us = 0;
    std::uint8_t polarity = 1;
};

struct SensorMapping {
    int crop_x = 52;
    int crop_y = 52;
    int crop_width = 23;
    int crop_height = 23;
    int polarity_channels = 2;
    int sensor_size = 128;

    int input_size() const {
        return crop_width * crop_height * polarity_channels;
    }
    void validate() const;
};

enum class EventFileFormat { csv, binary };

// Detects by extension: .csv -> csv, .selev -> binary.
EventFileFormat detect_event_format(const std::filesystem::path &path);
EventFileFormat parse_event_format_name(const std::string &name);

std::vector<SensorEvent> parse_event_file(const std::filesystem::path &path,
                                          EventFileFormat format);
void write_event_file(const std::filesystem::path &path,
                      std::span<const SensorEvent> events,
                      EventFileFormat format);

// Re-indexes sensor events to input-neuron indices; events outside the
// crop are dropped and counted, never clamped.
struct MappedEvents {
    std::vector<Event> events;
    std::uint64_t dropped = 0;
};
MappedEvents map_to_input(std::span<const SensorEvent> events,
                          const SensorMapping &mapping);

// One recording, already binned into frames of the input layer.
struct Recording {
    std::string id;
    int label = -1;
    std::vector<TimestepFrame> frames;
};

// Reads manifest.csv ("filename,label" per line) and every referenced
// event file under dir; returns recordings in manifest order.
struct Dataset {
    std::vector<Recording> recordings;
    std::uint64_t dropped_events = 0;
};
Dataset load_dataset(const std::filesystem::path &dir,
                     const SensorMapping &mapping, std::int64_t tau_us);

// First `train_per_class` recordings of each label for training, last
// `test_per_class` for testing, in their original order.
struct Split {
    std::vector<const Recording *> train;
    std::vector<const Recording *> test;
};
Split split_train_test(const Dataset &dataset, int train_per_class,
                       int test_per_class);

// Recordings concatenated in a seeded random order, `gap` zero frames
// between consecutive recordings. Iteration yields one frame per step
// with the active label (-1 during gaps) and the recording ordinal.
class AssembledStream {
public:
    AssembledStream(std::vector<const Recording *> recordings,
                    std::vector<std::size_t> order, int gap,
                    std::size_t layer_size);

    std::int64_t length() const { return length_; }
    std::size_t layer_size() const { return layer_size_; }
    std::size_t recording_count() const { return order_.size(); }
    int recording_label(std::size_t ordinal) const;

    template <typename Fn> void for_each(Fn &&fn) const {
        TimestepFrame zero(0, layer_size_);
        std::int64_t t = 0;
        for (std::size_t pos = 0; pos < order_.size(); ++pos) {
            const Recording &rec = *recordings_[order_[pos]];
            for (const TimestepFrame &f : rec.frames) {
                fn(t, std::span<const double>(f.values), rec.label,
                   static_cast<long>(pos));
                ++t;
            }
            if (pos + 1 < order_.size()) {
                for (int g = 0; g < gap_; ++g) {
                    fn(t, std::span<const double>(zero.values), -1, -1L);
                    ++t;
                }
            }
        }
    }

private:
    std::vector<const Recording *> recordings_;
    std::vector<std::size_t> order_;
    int gap_ = 0;
    std::size_t layer_size_ = 0;
    std::int64_t length_ = 0;
};

AssembledStream assemble_stream(std::span<const Recording *const> recordings,
                                int gap, RngStream &rng,
                                std::size_t layer_size);

// Synthetic moving-pattern classes.
// 0 bar moving right, 1 bar moving left, 2 bar moving down, 3 bar moving
// up, 4 corner moving diagonally. The pattern's leading edge emits ON
// events, the trailing edge OFF events; noise_rate adds Poisson
// background events per neuron-step and blurs the edges.
inline constexpr int kSynthClassCount = 5;

struct SynthRecording {
    std::vector<SensorEvent> events;
    int label = -1;
    int length_steps = 0;
};

SynthRecording synth_moving_pattern(int class_id, int length,
                                    double noise_rate, RngStream &rng,
                                    const SensorMapping &mapping,
                                    std::int64_t tau_us);

// Bins a synthetic recording, padding with zero frames to its declared
// length.
Recording bin_synth_recording(const SynthRecording &synth,
                              const SensorMapping &mapping,
                              std::int64_t tau_us, const std::string &id);

} // namespace sel

#endif
