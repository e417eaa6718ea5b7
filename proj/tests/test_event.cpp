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

#include "core/event.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

#include <doctest.h>

#include <numeric>

using namespace sel;

namespace {

bool code_is(const Error &e, ErrorCode c) { return e.code() == c; }

} // namespace

TEST_CASE("bin_events sums simultaneous spikes within a bin") {
    std::vector<Event> events{{3, 5, 1.0}, {3, 29, 1.0}};
    auto frames = bin_events(events, 30, 8, 0);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].t == 0);
    CHECK(frames[0].values[3] == doctest::Approx(2.0));
    CHECK(frames[0].values[0] == 0.0);
}

TEST_CASE("bin_events on an empty sequence yields no frames") {
    CHECK(bin_events({}, 30, 8, 0).empty());
}

TEST_CASE("bin boundaries are half-open") {
    std::vector<Event> events{{0, 30, 1.0}};
    auto frames = bin_events(events, 30, 2, 0);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].values[0] == 0.0);
    CHECK(frames[1].values[0] == 1.0);
}

TEST_CASE("bin_events rejects out-of-order and out-of-bounds events") {
    std::vector<Event> unordered{{0, 50, 1.0}, {0, 10, 1.0}};
    CHECK_THROWS_WITH_AS(bin_events(unordered, 30, 2, 0),
                         doctest::Contains("precedes"), Error);
    try {
        bin_events(unordered, 30, 2, 0);
    } catch (const Error &e) {
        CHECK(code_is(e, ErrorCode::ordering));
    }

    std::vector<Event> outside{{5, 10, 1.0}};
    try {
        bin_events(outside, 30, 2, 0);
        FAIL("expected bounds error");
    } catch (const Error &e) {
        CHECK(code_is(e, ErrorCode::bounds));
    }
}

TEST_CASE("total spike mass is conserved by binning") {
    RngStream rng(7, "test/bin-mass");
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Event> events;
        std::int64_t t = 0;
        double mass = 0.0;
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 40.0));
        for (int i = 0; i < n; ++i) {
            t += static_cast<std::int64_t>(rng.uniform(0.0, 70.0));
            const double strength = rng.uniform(0.0, 3.0);
            events.push_back(
                {static_cast<int>(rng.uniform(0.0, 6.0)), t, strength});
            mass += strength;
        }
        double binned = 0.0;
        for (const auto &f : bin_events(events, 30, 6, 0))
            binned += std::accumulate(f.values.begin(), f.values.end(), 0.0);
        CHECK(binned == doctest::Approx(mass));
    }
}

TEST_CASE("history window fills, evicts and rejects gaps") {
    HistoryWindow window(2);
    CHECK_FALSE(window.filled());

    window.push(TimestepFrame(0, 3));
    CHECK(window.size() == 1);
    CHECK_FALSE(window.filled());

    window.push(TimestepFrame(1, 3));
    CHECK(window.filled());
    CHECK(window.newest_t() == 1);

    TimestepFrame f2(2, 3);
    f2.values[1] = 4.0;
    window.push(std::move(f2));
    CHECK(window.filled());
    CHECK(window.newest_t() == 2);
    CHECK(window.back(1).t == 1); // t=0 evicted
    CHECK(window.back(0).values[1] == 4.0);

    try {
        window.push(TimestepFrame(7, 3));
        FAIL("expected gap error");
    } catch (const Error &e) {
        CHECK(code_is(e, ErrorCode::gap));
    }
}

TEST_CASE("K pushes fill a window, K-1 do not") {
    const int K = 5;
    HistoryWindow window(K);
    for (int i = 0; i < K - 1; ++i) window.push(TimestepFrame(i, 2));
    CHECK_FALSE(window.filled());
    window.push(TimestepFrame(K - 1, 2));
    CHECK(window.filled());
}

TEST_CASE("fill_zero pre-loads silence ending at t0-1") {
    HistoryWindow window(3);
    window.fill_zero(4, 10);
    CHECK(window.filled());
    CHECK(window.newest_t() == 9);
    window.push(TimestepFrame(10, 4));
    CHECK(window.newest_t() == 10);
}
