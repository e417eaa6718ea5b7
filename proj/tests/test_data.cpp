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

#include "core/data.hpp"

#include "core/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace sel;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("sel-test-" +
                        std::to_string(
                            std::chrono::steady_clock::now()
                                .time_since_epoch()
                                .count()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("canonical CSV parses coordinates, timestamp and polarity") {
    TempDir dir;
    const auto path = dir.path / "events.csv";
    std::ofstream(path) << "x,y,t_us,polarity\n52,52,1000,1\n52,53,2000,0\n";

    const auto events = parse_event_file(path, EventFileFormat::csv);
    REQUIRE(events.size() == 2);
    CHECK(events[0].x == 52);
    CHECK(events[0].y == 52);
    CHECK(events[0].t_us == 1000);
    CHECK(events[0].polarity == 1);
    CHECK(events[1].polarity == 0);
}

TEST_CASE("empty CSV yields an empty sequence") {
    TempDir dir;
    const auto path = dir.path / "empty.csv";
    std::ofstream(path) << "x,y,t_us,polarity\n";
    CHECK(parse_event_file(path, EventFileFormat::csv).empty());
}

TEST_CASE("malformed CSV names the offending line") {
    TempDir dir;
    const auto path = dir.path / "bad.csv";
    std::ofstream(path) << "x,y,t_us,polarity\n52,52,abc,1\n";
    try {
        parse_event_file(path, EventFileFormat::csv);
        FAIL("expected parse error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("decreasing timestamps are rejected") {
    TempDir dir;
    const auto path = dir.path / "rewind.csv";
    std::ofstream(path) << "x,y,t_us,polarity\n1,1,500,1\n1,1,100,1\n";
    try {
        parse_event_file(path, EventFileFormat::csv);
        FAIL("expected ordering error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::ordering);
    }
}

TEST_CASE("binary round trip is bit-exact and CSV survives the cycle") {
    TempDir dir;
    std::vector<SensorEvent> events{{52, 52, 0, 1},
                                    {60, 70, 999, 0},
                                    {60, 70, 999, 1},
                                    {127, 127, 123456789, 0}};

    const auto bin_path = dir.path / "events.selev";
    write_event_file(bin_path, events, EventFileFormat::binary);
    const auto loaded = parse_event_file(bin_path, EventFileFormat::binary);
    REQUIRE(loaded.size() == events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        CHECK(loaded[i].x == events[i].x);
        CHECK(loaded[i].y == events[i].y);
        CHECK(loaded[i].t_us == events[i].t_us);
        CHECK(loaded[i].polarity == events[i].polarity);
    }
    const auto bin2 = dir.path / "events2.selev";
    write_event_file(bin2, loaded, EventFileFormat::binary);
    CHECK(read_file(bin_path) == read_file(bin2));

    const auto csv_path = dir.path / "events.csv";
    write_event_file(csv_path, events, EventFileFormat::csv);
    const auto csv_events = parse_event_file(csv_path, EventFileFormat::csv);
    const auto csv2 = dir.path / "events2.csv";
    write_event_file(csv2, csv_events, EventFileFormat::csv);
    CHECK(read_file(csv_path) == read_file(csv2));
}

TEST_CASE("sensor mapping sends crop origin to channel offsets") {
    SensorMapping mapping; // defaults: origin (52,52), 23x23, 2 channels
    std::vector<SensorEvent> events{
        {52, 52, 0, 1},  // ON at origin -> neuron 0
        {52, 52, 10, 0}, // OFF at origin -> neuron 529
        {0, 0, 20, 1},   // outside crop -> dropped
        {54, 53, 30, 1}, // (x=54, y=53) -> (y-52)*23 + (x-52) = 25
    };
    const auto mapped = map_to_input(events, mapping);
    CHECK(mapped.dropped == 1);
    REQUIRE(mapped.events.size() == 3);
    CHECK(mapped.events[0].neuron == 0);
    CHECK(mapped.events[1].neuron == 529);
    CHECK(mapped.events[2].neuron == 25);
    for (const Event &e : mapped.events) {
        CHECK(e.neuron >= 0);
        CHECK(e.neuron < mapping.input_size());
    }
}

TEST_CASE("mapping never exceeds the input range on random events") {
    SensorMapping mapping;
    RngStream rng(3, "test/map-range");
    std::vector<SensorEvent> events;
    std::int64_t t = 0;
    for (int i = 0; i < 2000; ++i) {
        t += static_cast<std::int64_t>(rng.uniform(0.0, 10.0));
        events.push_back({static_cast<std::uint16_t>(rng.uniform(0.0, 128.0)),
                          static_cast<std::uint16_t>(rng.uniform(0.0, 128.0)),
                          t, rng.bernoulli(0.5) ? std::uint8_t{1}
                                                : std::uint8_t{0}});
    }
    const auto mapped = map_to_input(events, mapping);
    for (const Event &e : mapped.events) {
        CHECK(e.neuron >= 0);
        CHECK(e.neuron < 1058);
    }
    CHECK(mapped.events.size() + mapped.dropped == events.size());
}

TEST_CASE("crop must fit the sensor") {
    SensorMapping mapping;
    mapping.crop_x = 120;
    CHECK_THROWS_AS(mapping.validate(), Error);
}

TEST_CASE("assembled stream interleaves gaps and tracks labels") {
    Recording a{"a", 3, {}};
    Recording b{"b", 7, {}};
    for (int t = 0; t < 4; ++t) {
        a.frames.emplace_back(t, 2);
        a.frames.back().values[0] = 1.0;
        b.frames.emplace_back(t, 2);
    }
    std::vector<const Recording *> recs{&a, &b};
    RngStream rng(1, "test/stream");
    const auto stream = assemble_stream(recs, 3, rng, 2);
    CHECK(stream.length() == 4 + 3 + 4);

    long gap_steps = 0, labeled = 0;
    stream.for_each([&](std::int64_t, std::span<const double> v, int label,
                        long rec) {
        if (label < 0) {
            ++gap_steps;
            CHECK(rec == -1);
            for (double x : v) CHECK(x == 0.0);
        } else {
            ++labeled;
            CHECK((label == 3 || label == 7));
        }
    });
    CHECK(gap_steps == 3);
    CHECK(labeled == 8);

    SUBCASE("gap zero with one recording reproduces it") {
        std::vector<const Recording *> one{&a};
        RngStream r2(1, "test/stream2");
        const auto s = assemble_stream(one, 0, r2, 2);
        CHECK(s.length() == 4);
    }

    SUBCASE("fixed seed fixes the order") {
        RngStream r3(5, "test/stream-order");
        RngStream r4(5, "test/stream-order");
        const auto s1 = assemble_stream(recs, 0, r3, 2);
        const auto s2 = assemble_stream(recs, 0, r4, 2);
        std::vector<int> l1, l2;
        s1.for_each([&](std::int64_t, std::span<const double>, int label,
                        long) { l1.push_back(label); });
        s2.for_each([&](std::int64_t, std::span<const double>, int label,
                        long) { l2.push_back(label); });
        CHECK(l1 == l2);
    }

    SUBCASE("empty recording list is a config error") {
        std::vector<const Recording *> none;
        RngStream r5(1, "x");
        CHECK_THROWS_AS(assemble_stream(none, 3, r5, 2), Error);
    }
}

TEST_CASE("split takes the first and last recordings per class") {
    Dataset dataset;
    for (int label = 0; label < 2; ++label)
        for (int i = 0; i < 12; ++i) {
            Recording rec;
            rec.id = "r" + std::to_string(label) + "_" + std::to_string(i);
            rec.label = label;
            rec.frames.emplace_back(0, 2);
            dataset.recordings.push_back(std::move(rec));
        }

    const auto split = split_train_test(dataset, 10, 2);
    CHECK(split.train.size() == 20);
    CHECK(split.test.size() == 4);
    CHECK(split.train.front()->id == "r0_0");
    CHECK(split.test.front()->id == "r0_10");

    CHECK_THROWS_AS(split_train_test(dataset, 11, 2), Error);
}

TEST_CASE("clean moving bar shifts its ON column by one per frame") {
    SensorMapping mapping;
    RngStream rng(9, "test/synth-clean");
    const auto synth = synth_moving_pattern(0, 10, 0.0, rng, mapping, 30000);
    CHECK(synth.label == 0);

    // group ON events by frame and compare column sets
    std::vector<std::set<int>> on_columns(10);
    for (const SensorEvent &e : synth.events) {
        if (e.polarity != 1) continue;
        const int frame = static_cast<int>(e.t_us / 30000);
        on_columns[static_cast<std::size_t>(frame)].insert(
            static_cast<int>(e.x) - mapping.crop_x);
    }
    for (int f = 1; f < 10; ++f) {
        REQUIRE(on_columns[static_cast<std::size_t>(f)].size() == 1);
        const int prev = *on_columns[static_cast<std::size_t>(f - 1)].begin();
        const int cur = *on_columns[static_cast<std::size_t>(f)].begin();
        CHECK(cur == (prev + 1) % mapping.crop_width);
    }
}

TEST_CASE("synthetic recording of length 1 yields a single frame") {
    SensorMapping mapping;
    RngStream rng(9, "test/synth-one");
    const auto synth = synth_moving_pattern(2, 1, 0.0, rng, mapping, 30000);
    const auto rec = bin_synth_recording(synth, mapping, 30000, "one");
    CHECK(rec.frames.size() == 1);
}

TEST_CASE("background noise count follows the Poisson rate") {
    // 1058 neurons x 10 steps is ~10^4 neuron-steps; at rate 0.01 the
    // generator should add ~100 background events. Events away from the
    // two edge columns of their frame can only be noise; the edges cover
    // 46/1058 of the grid, so that count underestimates by ~4%.
    SensorMapping mapping;
    RngStream rng(41, "test/synth-noise");
    const int length = 10;
    const auto noisy =
        synth_moving_pattern(0, length, 0.01, rng, mapping, 30000);

    long off_edge = 0;
    for (const SensorEvent &e : noisy.events) {
        const int frame = static_cast<int>(e.t_us / 30000);
        const int gx = static_cast<int>(e.x) - mapping.crop_x;
        const int lead = frame % mapping.crop_width;
        const int trail =
            (frame - 1 + mapping.crop_width) % mapping.crop_width;
        if (gx != lead && gx != trail) ++off_edge;
    }
    const double estimate = static_cast<double>(off_edge) /
                            (1.0 - 46.0 / 1058.0);
    CHECK(std::abs(estimate - 100.0) <= 30.0);
}

TEST_CASE("unknown synthetic class is rejected") {
    SensorMapping mapping;
    RngStream rng(1, "x");
    CHECK_THROWS_AS(synth_moving_pattern(99, 10, 0.0, rng, mapping, 30000),
                    Error);
}

TEST_CASE("dataset loads from a manifest directory") {
    TempDir dir;
    SensorMapping mapping;
    RngStream rng(13, "test/dataset");
    for (int i = 0; i < 2; ++i) {
        const auto synth =
            synth_moving_pattern(i, 5, 0.0, rng, mapping, 30000);
        write_event_file(dir.path / ("rec" + std::to_string(i) + ".csv"),
                         synth.events, EventFileFormat::csv);
    }
    std::ofstream(dir.path / "manifest.csv")
        << "rec0.csv,0\nrec1.csv,1\n";

    const auto dataset = load_dataset(dir.path, mapping, 30000);
    REQUIRE(dataset.recordings.size() == 2);
    CHECK(dataset.recordings[0].label == 0);
    CHECK(dataset.recordings[1].label == 1);
    CHECK(dataset.recordings[0].frames.size() == 5);
    CHECK(dataset.dropped_events == 0);
}
