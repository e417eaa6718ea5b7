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

#include "data.hpp"

#include "error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace sel {

namespace {

constexpr char kCsvHeader[] = "x,y,t_us,polarity";
constexpr char kBinaryMagic[5] = {'S', 'E', 'L', 'E', 'V'};
constexpr std::uint8_t kBinaryVersion = 1;

[[noreturn]] void parse_fail(const std::filesystem::path &path,
                             std::size_t line, const std::string &what) {
    fail(ErrorCode::parse,
         path.string() + ":" + std::to_string(line) + ": " + what);
}

void check_order(const std::filesystem::path &path,
                 std::span<const SensorEvent> events) {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t_us < events[i - 1].t_us)
            fail(ErrorCode::ordering,
                 path.string() + ": timestamps decrease at record " +
                     std::to_string(i));
}

std::vector<SensorEvent> parse_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());

    std::vector<SensorEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != kCsvHeader)
                parse_fail(path, lineno,
                           "expected header '" + std::string(kCsvHeader) +
                               "'");
            continue;
        }
        if (line.empty()) continue;

        std::array<std::int64_t, 4> fields{};
        const char *p = line.data();
        const char *end = line.data() + line.size();
        for (int f = 0; f < 4; ++f) {
            auto [next, ec] = std::from_chars(p, end, fields[static_cast<std::size_t>(f)]);
            if (ec != std::errc{})
                parse_fail(path, lineno, "malformed field " +
                                             std::to_string(f + 1) + " in '" +
                                             line + "'");
            p = next;
            if (f < 3) {
                if (p == end || *p != ',')
                    parse_fail(path, lineno, "expected ',' after field " +
                                                 std::to_string(f + 1));
                ++p;
            }
        }
        if (p != end) parse_fail(path, lineno, "trailing characters");

        auto [x, y, t, pol] = fields;
        if (x < 0 || x > 0xffff || y < 0 || y > 0xffff)
            parse_fail(path, lineno, "pixel coordinate out of range");
        if (t < 0) parse_fail(path, lineno, "negative timestamp");
        if (pol != 0 && pol != 1)
            parse_fail(path, lineno, "polarity must be 0 or 1");

        events.push_back({static_cast<std::uint16_t>(x),
                          static_cast<std::uint16_t>(y), t,
                          static_cast<std::uint8_t>(pol)});
    }
    check_order(path, events);
    return events;
}

void write_csv(const std::filesystem::path &path,
               std::span<const SensorEvent> events) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << kCsvHeader << '\n';
    for (const SensorEvent &e : events)
        out << e.x << ',' << e.y << ',' << e.t_us << ','
            << static_cast<int>(e.polarity) << '\n';
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

template <typename T> void put_le(std::ostream &out, T value) {
    std::array<unsigned char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>(
            (static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char *>(buf.data()), sizeof(T));
}

template <typename T> bool get_le(std::istream &in, T &value) {
    std::array<unsigned char, sizeof(T)> buf{};
    if (!in.read(reinterpret_cast<char *>(buf.data()), sizeof(T)))
        return false;
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    value = static_cast<T>(v);
    return true;
}

std::vector<SensorEvent> parse_binary(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());

    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kBinaryMagic, 5) != 0)
        fail(ErrorCode::parse, path.string() + ": not a canonical event file");
    std::uint8_t version = 0;
    if (!get_le(in, version) || version != kBinaryVersion)
        fail(ErrorCode::parse,
             path.string() + ": unsupported version " +
                 std::to_string(static_cast<int>(version)));
    std::uint64_t count = 0;
    if (!get_le(in, count))
        fail(ErrorCode::parse, path.string() + ": truncated header");

    std::vector<SensorEvent> events;
    events.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        SensorEvent e;
        std::uint64_t t = 0;
        if (!get_le(in, e.x) || !get_le(in, e.y) || !get_le(in, t) ||
            !get_le(in, e.polarity))
            fail(ErrorCode::parse, path.string() + ": truncated at record " +
                                       std::to_string(i));
        if (e.polarity != 0 && e.polarity != 1)
            fail(ErrorCode::parse, path.string() + ": bad polarity at record " +
                                       std::to_string(i));
        e.t_us = static_cast<std::int64_t>(t);
        events.push_back(e);
    }
    check_order(path, events);
    return events;
}

void write_binary(const std::filesystem::path &path,
                  std::span<const SensorEvent> events) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out.write(kBinaryMagic, 5);
    put_le(out, kBinaryVersion);
    put_le(out, static_cast<std::uint64_t>(events.size()));
    for (const SensorEvent &e : events) {
        put_le(out, e.x);
        put_le(out, e.y);
        put_le(out, static_cast<std::uint64_t>(e.t_us));
        put_le(out, e.polarity);
    }
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

} // namespace

void SensorMapping::validate() const {
    if (crop_width < 1 || crop_height < 1)
        fail(ErrorCode::config, "crop size must be >= 1");
    if (polarity_channels != 2)
        fail(ErrorCode::config, "expected two polarity channels");
    if (crop_x < 0 || crop_y < 0 || crop_x + crop_width > sensor_size ||
        crop_y + crop_height > sensor_size)
        fail(ErrorCode::config, "crop window does not fit the sensor array");
}

EventFileFormat detect_event_format(const std::filesystem::path &path) {
    const std::string ext = path.extension().string();
    if (ext == ".csv") return EventFileFormat::csv;
    if (ext == ".selev") return EventFileFormat::binary;
    fail(ErrorCode::config,
         "cannot detect event format from extension '" + ext + "'");
}

EventFileFormat parse_event_format_name(const std::string &name) {
    if (name == "csv") return EventFileFormat::csv;
    if (name == "bin" || name == "binary" || name == "selev")
        return EventFileFormat::binary;
    fail(ErrorCode::config, "unknown event format '" + name + "'");
}

std::vector<SensorEvent> parse_event_file(const std::filesystem::path &path,
                                          EventFileFormat format) {
    return format == EventFileFormat::csv ? parse_csv(path)
                                          : parse_binary(path);
}

void write_event_file(const std::filesystem::path &path,
                      std::span<const SensorEvent> events,
                      EventFileFormat format) {
    if (format == EventFileFormat::csv)
        write_csv(path, events);
    else
        write_binary(path, events);
}

MappedEvents map_to_input(std::span<const SensorEvent> events,
                          const SensorMapping &mapping) {
    mapping.validate();
    MappedEvents out;
    out.events.reserve(events.size());
    for (const SensorEvent &e : events) {
        const int gx = static_cast<int>(e.x) - mapping.crop_x;
        const int gy = static_cast<int>(e.y) - mapping.crop_y;
        if (gx < 0 || gx >= mapping.crop_width || gy < 0 ||
            gy >= mapping.crop_height) {
            ++out.dropped;
            continue;
        }
        const int channel = e.polarity == 1 ? 0 : 1;
        const int index = gy * mapping.crop_width + gx +
                          channel * mapping.crop_width * mapping.crop_height;
        out.events.push_back({index, e.t_us, 1.0});
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path &dir,
                     const SensorMapping &mapping, std::int64_t tau_us) {
    const auto manifest_path = dir / "manifest.csv";
    std::ifstream manifest(manifest_path);
    if (!manifest)
        fail(ErrorCode::io, "cannot open " + manifest_path.string());

    Dataset dataset;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            parse_fail(manifest_path, lineno, "expected 'file,label'");
        const std::string file = line.substr(0, comma);
        int label = -1;
        const char *lb = line.data() + comma + 1;
        auto [p, ec] = std::from_chars(lb, line.data() + line.size(), label);
        if (ec != std::errc{} || p != line.data() + line.size() || label < 0)
            parse_fail(manifest_path, lineno, "malformed label");

        const auto path = dir / file;
        const auto events = parse_event_file(path, detect_event_format(path));
        auto mapped = map_to_input(events, mapping);
        dataset.dropped_events += mapped.dropped;

        Recording rec;
        rec.id = file;
        rec.label = label;
        rec.frames =
            bin_events(mapped.events, tau_us, mapping.input_size(), 0);
        if (rec.frames.empty())
            rec.frames.emplace_back(0,
                                    static_cast<std::size_t>(mapping.input_size()));
        dataset.recordings.push_back(std::move(rec));
    }
    if (dataset.recordings.empty())
        fail(ErrorCode::config,
             "manifest " + manifest_path.string() + " lists no recordings");
    return dataset;
}

Split split_train_test(const Dataset &dataset, int train_per_class,
                       int test_per_class) {
    if (train_per_class < 1 || test_per_class < 1)
        fail(ErrorCode::config, "split sizes must be >= 1");

    std::map<int, std::vector<const Recording *>> by_label;
    for (const Recording &rec : dataset.recordings)
        by_label[rec.label].push_back(&rec);

    Split split;
    for (const auto &[label, recs] : by_label) {
        if (static_cast<int>(recs.size()) < train_per_class + test_per_class)
            fail(ErrorCode::config,
                 "label " + std::to_string(label) + " has " +
                     std::to_string(recs.size()) +
                     " recordings, need at least " +
                     std::to_string(train_per_class + test_per_class));
        for (int i = 0; i < train_per_class; ++i)
            split.train.push_back(recs[static_cast<std::size_t>(i)]);
        for (int i = 0; i < test_per_class; ++i)
            split.test.push_back(
                recs[recs.size() - static_cast<std::size_t>(test_per_class) +
                     static_cast<std::size_t>(i)]);
    }
    return split;
}

AssembledStream::AssembledStream(std::vector<const Recording *> recordings,
                                 std::vector<std::size_t> order, int gap,
                                 std::size_t layer_size)
    : recordings_(std::move(recordings)), order_(std::move(order)),
      gap_(gap), layer_size_(layer_size) {
    for (std::size_t pos = 0; pos < order_.size(); ++pos) {
        const Recording &rec = *recordings_[order_[pos]];
        for (const TimestepFrame &f : rec.frames)
            if (f.size() != layer_size_)
                fail(ErrorCode::bounds,
                     "recording " + rec.id + " frame size mismatch");
        length_ += static_cast<std::int64_t>(rec.frames.size());
        if (pos + 1 < order_.size()) length_ += gap_;
    }
}

int AssembledStream::recording_label(std::size_t ordinal) const {
    if (ordinal >= order_.size())
        fail(ErrorCode::bounds, "recording ordinal out of range");
    return recordings_[order_[ordinal]]->label;
}

AssembledStream assemble_stream(std::span<const Recording *const> recordings,
                                int gap, RngStream &rng,
                                std::size_t layer_size) {
    if (recordings.empty())
        fail(ErrorCode::config, "cannot assemble an empty recording list");
    if (gap < 0) fail(ErrorCode::config, "gap must be >= 0");
    std::vector<const Recording *> recs(recordings.begin(), recordings.end());
    return AssembledStream(std::move(recs), rng.permutation(recordings.size()),
                           gap, layer_size);
}

SynthRecording synth_moving_pattern(int class_id, int length,
                                    double noise_rate, RngStream &rng,
                                    const SensorMapping &mapping,
                                    std::int64_t tau_us) {
    mapping.validate();
    if (class_id < 0 || class_id >= kSynthClassCount)
        fail(ErrorCode::config,
             "unknown synthetic class " + std::to_string(class_id));
    if (length < 1) fail(ErrorCode::config, "length must be >= 1");
    if (noise_rate < 0.0)
        fail(ErrorCode::config, "noise rate must be non-negative");

    const int W = mapping.crop_width;
    const int H = mapping.crop_height;
    const bool clean = noise_rate == 0.0;

    // Leading-edge cell positions of the pattern at phase p.
    auto edge_cells = [&](int phase) {
        std::vector<std::pair<int, int>> cells; // (gx, gy)
        const int px = ((phase % W) + W) % W;
        const int py = ((phase % H) + H) % H;
        switch (class_id) {
        case 0: // bar right: vertical line sweeping +x
            for (int gy = 0; gy < H; ++gy) cells.emplace_back(px, gy);
            break;
        case 1: // bar left
            for (int gy = 0; gy < H; ++gy)
                cells.emplace_back(W - 1 - px, gy);
            break;
        case 2: // bar down: horizontal line sweeping +y
            for (int gx = 0; gx < W; ++gx) cells.emplace_back(gx, py);
            break;
        case 3: // bar up
            for (int gx = 0; gx < W; ++gx)
                cells.emplace_back(gx, H - 1 - py);
            break;
        case 4: // corner moving diagonally: an L of half the grid size
            for (int d = 0; d < W / 2; ++d) {
                cells.emplace_back((px + d) % W, py);
                cells.emplace_back(px, (py + d) % H);
            }
            break;
        default:
            break;
        }
        return cells;
    };

    SynthRecording rec;
    rec.label = class_id;
    rec.length_steps = length;

    for (int s = 0; s < length; ++s) {
        std::vector<SensorEvent> step_events;
        const std::int64_t bin_start = static_cast<std::int64_t>(s) * tau_us;
        auto stamp = [&] {
            return clean ? bin_start + tau_us / 2
                         : bin_start + static_cast<std::int64_t>(rng.uniform(
                                           0.0, static_cast<double>(tau_us)));
        };
        auto emit = [&](int gx, int gy, std::uint8_t polarity) {
            if (!clean && !rng.bernoulli(0.9)) return; // blurred edges
            step_events.push_back(
                {static_cast<std::uint16_t>(mapping.crop_x + gx),
                 static_cast<std::uint16_t>(mapping.crop_y + gy), stamp(),
                 polarity});
        };

        for (auto [gx, gy] : edge_cells(s)) emit(gx, gy, 1); // leading, ON
        if (s > 0)
            for (auto [gx, gy] : edge_cells(s - 1)) emit(gx, gy, 0);

        if (!clean) {
            const double mean =
                noise_rate * static_cast<double>(W * H * 2);
            const int extra = rng.poisson(mean);
            for (int n = 0; n < extra; ++n) {
                const int gx = static_cast<int>(
                    rng.uniform(0.0, static_cast<double>(W)));
                const int gy = static_cast<int>(
                    rng.uniform(0.0, static_cast<double>(H)));
                const std::uint8_t pol = rng.bernoulli(0.5) ? 1 : 0;
                step_events.push_back(
                    {static_cast<std::uint16_t>(mapping.crop_x +
                                                std::min(gx, W - 1)),
                     static_cast<std::uint16_t>(mapping.crop_y +
                                                std::min(gy, H - 1)),
                     stamp(), pol});
            }
        }

        std::stable_sort(step_events.begin(), step_events.end(),
                         [](const SensorEvent &a, const SensorEvent &b) {
                             return a.t_us < b.t_us;
                         });
        rec.events.insert(rec.events.end(), step_events.begin(),
                          step_events.end());
    }
    return rec;
}

Recording bin_synth_recording(const SynthRecording &synth,
                              const SensorMapping &mapping,
                              std::int64_t tau_us, const std::string &id) {
    auto mapped = map_to_input(synth.events, mapping);
    Recording rec;
    rec.id = id;
    rec.label = synth.label;
    rec.frames = bin_events(mapped.events, tau_us, mapping.input_size(), 0);
    while (static_cast<int>(rec.frames.size()) < synth.length_steps)
        rec.frames.emplace_back(static_cast<std::int64_t>(rec.frames.size()),
                                static_cast<std::size_t>(mapping.input_size()));
    return rec;
}

} // namespace sel
