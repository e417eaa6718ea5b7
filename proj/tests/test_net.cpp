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

#include "core/net.hpp"

#include "core/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace sel;

namespace {

HistoryWindow window_from(std::vector<std::vector<double>> frames_oldest_first) {
    HistoryWindow w(static_cast<int>(frames_oldest_first.size()));
    std::int64_t t = 0;
    for (auto &values : frames_oldest_first) {
        TimestepFrame f(t++, values.size());
        f.values = values;
        w.push(std::move(f));
    }
    return w;
}

DelayedWeightTensor random_tensor(int post, int pre, int k, RngStream &rng) {
    DelayedWeightTensor w(post, pre, k);
    w.fill_uniform(rng, -1.0, 1.0);
    return w;
}

} // namespace

TEST_CASE("relu rectifies at zero") {
    CHECK(relu(-1.0) == 0.0);
    CHECK(relu(0.0) == 0.0);
    CHECK(relu(2.5) == 2.5);
    CHECK_THROWS_AS(relu(std::numeric_limits<double>::quiet_NaN()), Error);
}

TEST_CASE("compute_drive matches the delayed weighted sum") {
    // one pre, one post, K=2: w_k1 pairs with the newest frame
    DelayedWeightTensor w(1, 1, 2);
    w.at(0, 0, 1) = 0.5;
    w.at(0, 0, 2) = 0.25;
    auto win = window_from({{4.0}, {2.0}}); // h(t-1)=4, h(t)=2
    auto q = compute_drive(w, win);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == doctest::Approx(2.0)); // 0.5*2 + 0.25*4

    SUBCASE("all-zero window gives zero drive") {
        auto zero_win = window_from({{0.0}, {0.0}});
        CHECK(compute_drive(w, zero_win)[0] == 0.0);
    }
}

TEST_CASE("negative weights cancel symmetric input") {
    DelayedWeightTensor w(1, 2, 1);
    w.at(0, 0, 1) = 1.0;
    w.at(0, 1, 1) = -1.0;
    auto win = window_from({{3.0, 3.0}});
    CHECK(compute_drive(w, win)[0] == doctest::Approx(0.0));
}

TEST_CASE("compute_drive requires enough history") {
    DelayedWeightTensor w(1, 1, 2);
    HistoryWindow win(2);
    win.push(TimestepFrame(0, 1));
    try {
        compute_drive(w, win);
        FAIL("expected history error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::history);
    }
}

TEST_CASE("compute_inference is the time-transposed readout") {
    DelayedWeightTensor w(1, 1, 2);
    w.at(0, 0, 1) = 0.5;
    w.at(0, 0, 2) = 0.25;
    // window holds hidden frames t..t+1: h(t)=2 (oldest), h(t+1)=4
    auto win = window_from({{2.0}, {4.0}});
    auto q = compute_inference(w, win);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == doctest::Approx(2.0)); // 0.5*2 + 0.25*4

    SUBCASE("zero future window") {
        auto zero_win = window_from({{0.0}, {0.0}});
        CHECK(compute_inference(w, zero_win)[0] == 0.0);
    }
}

TEST_CASE("tied-weight round trip at K=1 reproduces the spike") {
    DelayedWeightTensor w(1, 1, 1);
    w.at(0, 0, 1) = 1.0;
    auto input_win = window_from({{3.0}});
    const double hidden = relu(compute_drive(w, input_win)[0]);
    CHECK(hidden == 3.0);
    auto hidden_win = window_from({{hidden}});
    CHECK(compute_inference(w, hidden_win)[0] == doctest::Approx(3.0));
}

TEST_CASE("inference equals drive on the space- and time-transposed tensor") {
    RngStream rng(11, "test/transpose");
    for (int trial = 0; trial < 30; ++trial) {
        const int post = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
        const int pre = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
        const int K = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
        auto w = random_tensor(post, pre, K, rng);

        std::vector<std::vector<double>> frames;
        for (int k = 0; k < K; ++k) {
            std::vector<double> v(static_cast<std::size_t>(post));
            for (auto &x : v) x = rng.uniform(0.0, 2.0);
            frames.push_back(std::move(v));
        }
        auto win = window_from(frames);

        const auto inferred = compute_inference(w, win);
        const auto transposed_drive = compute_drive(w.transposed(), win);
        REQUIRE(inferred.size() == transposed_drive.size());
        for (std::size_t i = 0; i < inferred.size(); ++i)
            CHECK(inferred[i] ==
                  doctest::Approx(transposed_drive[i]).epsilon(1e-12));
    }
}

TEST_CASE("drive is linear in the window") {
    RngStream rng(13, "test/linearity");
    for (int trial = 0; trial < 20; ++trial) {
        const int post = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
        const int pre = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
        const int K = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
        auto w = random_tensor(post, pre, K, rng);
        const double a = rng.uniform(0.0, 2.0);
        const double b = rng.uniform(0.0, 2.0);

        std::vector<std::vector<double>> f1, f2, mix;
        for (int k = 0; k < K; ++k) {
            std::vector<double> v1(static_cast<std::size_t>(pre)),
                v2(static_cast<std::size_t>(pre)),
                vm(static_cast<std::size_t>(pre));
            for (int i = 0; i < pre; ++i) {
                v1[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0);
                v2[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0);
                vm[static_cast<std::size_t>(i)] =
                    a * v1[static_cast<std::size_t>(i)] +
                    b * v2[static_cast<std::size_t>(i)];
            }
            f1.push_back(v1);
            f2.push_back(v2);
            mix.push_back(vm);
        }
        const auto q1 = compute_drive(w, window_from(f1));
        const auto q2 = compute_drive(w, window_from(f2));
        const auto qm = compute_drive(w, window_from(mix));
        for (std::size_t j = 0; j < qm.size(); ++j)
            CHECK(qm[j] ==
                  doctest::Approx(a * q1[j] + b * q2[j]).epsilon(1e-9));
    }
}

TEST_CASE("dropout masks are reproducible and honor the rate") {
    RngStream zero_rng(1, "test/dropout0");
    auto none = sample_dropout_mask(16, 0.0, zero_rng);
    for (auto r : none.retained) CHECK(r == 1);

    RngStream one_rng(1, "test/dropout1");
    auto all = sample_dropout_mask(16, 1.0, one_rng);
    for (auto r : all.retained) CHECK(r == 0);

    RngStream half_a(42, "test/dropout-half");
    RngStream half_b(42, "test/dropout-half");
    auto a = sample_dropout_mask(10000, 0.5, half_a);
    auto b = sample_dropout_mask(10000, 0.5, half_b);
    CHECK(a.retained == b.retained);

    long dropped = 0;
    for (auto r : a.retained) dropped += r == 0 ? 1 : 0;
    const double fraction = static_cast<double>(dropped) / 10000.0;
    CHECK(fraction == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::abs(fraction - 0.5) <= 0.02);

    RngStream rng(1, "test/dropout-range");
    CHECK_THROWS_AS(sample_dropout_mask(4, 1.5, rng), Error);
}

TEST_CASE("lagged drive reads the view ending lag steps back") {
    DelayedWeightTensor w(1, 1, 2);
    w.at(0, 0, 1) = 1.0;
    w.at(0, 0, 2) = 10.0;
    auto win = window_from({{1.0}, {2.0}, {3.0}, {4.0}});
    CHECK(compute_drive(w, win, 0)[0] == doctest::Approx(4.0 + 30.0));
    CHECK(compute_drive(w, win, 1)[0] == doctest::Approx(3.0 + 20.0));
    CHECK(compute_drive(w, win, 2)[0] == doctest::Approx(2.0 + 10.0));
}
