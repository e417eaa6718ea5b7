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

#include "net.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace sel {

DelayedWeightTensor::DelayedWeightTensor(int n_post, int n_pre, int delays)
    : n_post_(n_post), n_pre_(n_pre), k_(delays) {
    if (n_post < 1 || n_pre < 1 || delays < 1)
        fail(ErrorCode::config, "tensor dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(n_post) * row_stride(), 0.0);
}

double DelayedWeightTensor::at(int post, int pre, int k) const {
    return const_cast<DelayedWeightTensor *>(this)->at(post, pre, k);
}

double &DelayedWeightTensor::at(int post, int pre, int k) {
    if (post < 0 || post >= n_post_ || pre < 0 || pre >= n_pre_ || k < 1 ||
        k > k_)
        fail(ErrorCode::bounds, "weight index (" + std::to_string(post) +
                                    "," + std::to_string(pre) + "," +
                                    std::to_string(k) + ") out of range");
    return data_[static_cast<std::size_t>(post) * row_stride() +
                 static_cast<std::size_t>(pre) * static_cast<std::size_t>(k_) +
                 static_cast<std::size_t>(k - 1)];
}

const double *DelayedWeightTensor::row(int post) const {
    return data_.data() + static_cast<std::size_t>(post) * row_stride();
}

double *DelayedWeightTensor::row(int post) {
    return data_.data() + static_cast<std::size_t>(post) * row_stride();
}

void DelayedWeightTensor::fill_uniform(RngStream &rng, double lo, double hi) {
    for (double &w : data_) w = rng.uniform(lo, hi);
}

void DelayedWeightTensor::fill_zero() {
    std::fill(data_.begin(), data_.end(), 0.0);
}

DelayedWeightTensor DelayedWeightTensor::transposed() const {
    DelayedWeightTensor t(n_pre_, n_post_, k_);
    for (int j = 0; j < n_post_; ++j)
        for (int i = 0; i < n_pre_; ++i)
            for (int k = 1; k <= k_; ++k)
                t.at(i, j, k_ + 1 - k) = at(j, i, k);
    return t;
}

DropoutMask sample_dropout_mask(int size, double rate, RngStream &rng) {
    if (size < 1) fail(ErrorCode::config, "mask size must be >= 1");
    if (!(rate >= 0.0 && rate <= 1.0))
        fail(ErrorCode::config, "dropout rate must lie in [0,1]");
    DropoutMask mask;
    mask.rate = rate;
    mask.retained.resize(static_cast<std::size_t>(size));
    for (auto &r : mask.retained)
        r = rng.bernoulli(rate) ? std::uint8_t{0} : std::uint8_t{1};
    return mask;
}

double relu(double drive) {
    if (!std::isfinite(drive))
        fail(ErrorCode::numeric, "non-finite drive value");
    return drive > 0.0 ? drive : 0.0;
}

namespace {

void check_view(const HistoryWindow &window, int delays, int lag) {
    if (delays < 1) fail(ErrorCode::config, "delay count must be >= 1");
    if (lag < 0) fail(ErrorCode::config, "lag must be >= 0");
    if (window.size() < delays + lag)
        fail(ErrorCode::history,
             "window holds " + std::to_string(window.size()) +
                 " frames, need " + std::to_string(delays + lag));
}

} // namespace

std::vector<std::pair<std::size_t, double>>
active_entries(const std::vector<double> &history) {
    std::vector<std::pair<std::size_t, double>> active;
    for (std::size_t o = 0; o < history.size(); ++o)
        if (history[o] != 0.0) active.emplace_back(o, history[o]);
    return active;
}

std::vector<double> gather_drive_history(const HistoryWindow &window,
                                         int delays, int lag) {
    check_view(window, delays, lag);
    const std::size_t n = window.back(lag).size();
    std::vector<double> h(n * static_cast<std::size_t>(delays));
    for (int k = 1; k <= delays; ++k) {
        const TimestepFrame &f = window.back(lag + k - 1);
        if (f.size() != n)
            fail(ErrorCode::bounds, "frame sizes differ within window");
        const std::size_t off = static_cast<std::size_t>(k - 1);
        for (std::size_t i = 0; i < n; ++i)
            h[i * static_cast<std::size_t>(delays) + off] = f.values[i];
    }
    return h;
}

std::vector<double> gather_inference_history(const HistoryWindow &window,
                                             int delays, int lag) {
    check_view(window, delays, lag);
    const std::size_t n = window.back(lag).size();
    std::vector<double> g(n * static_cast<std::size_t>(delays));
    for (int k = 1; k <= delays; ++k) {
        // k-th view frame counted from the oldest end
        const TimestepFrame &f = window.back(lag + delays - k);
        if (f.size() != n)
            fail(ErrorCode::bounds, "frame sizes differ within window");
        const std::size_t off = static_cast<std::size_t>(k - 1);
        for (std::size_t j = 0; j < n; ++j)
            g[j * static_cast<std::size_t>(delays) + off] = f.values[j];
    }
    return g;
}

std::vector<double> drive_from_history(const DelayedWeightTensor &weights,
                                       const std::vector<double> &history) {
    const std::size_t stride = weights.row_stride();
    if (history.size() != stride)
        fail(ErrorCode::bounds,
             "history length " + std::to_string(history.size()) +
                 " does not match tensor pre size " + std::to_string(stride));
    std::vector<double> q(static_cast<std::size_t>(weights.post_size()));
    const double *h = history.data();

    // Sparse activity dominates event streams; skipping zero terms is
    // bit-identical to the dense sum and avoids streaming untouched
    // weights through the cache.
    const auto active = active_entries(history);
    if (active.size() * 4 < stride) {
        for (int j = 0; j < weights.post_size(); ++j) {
            const double *row = weights.row(j);
            double acc = 0.0;
            for (const auto &[o, v] : active) acc += row[o] * v;
            if (!std::isfinite(acc))
                fail(ErrorCode::numeric, "non-finite drive");
            q[static_cast<std::size_t>(j)] = acc;
        }
        return q;
    }

    for (int j = 0; j < weights.post_size(); ++j) {
        const double *row = weights.row(j);
        double acc = 0.0;
        for (std::size_t o = 0; o < stride; ++o) acc += row[o] * h[o];
        if (!std::isfinite(acc))
            fail(ErrorCode::numeric, "non-finite drive");
        q[static_cast<std::size_t>(j)] = acc;
    }
    return q;
}

std::vector<double>
inference_from_history(const DelayedWeightTensor &weights,
                       const std::vector<double> &history) {
    const int K = weights.delays();
    if (history.size() !=
        static_cast<std::size_t>(weights.post_size()) *
            static_cast<std::size_t>(K))
        fail(ErrorCode::bounds,
             "history length does not match tensor post size");
    std::vector<double> q(static_cast<std::size_t>(weights.pre_size()), 0.0);
    for (int j = 0; j < weights.post_size(); ++j) {
        const double *gj =
            history.data() + static_cast<std::size_t>(j) *
                                 static_cast<std::size_t>(K);
        const double *row = weights.row(j);
        for (int i = 0; i < weights.pre_size(); ++i) {
            const double *w =
                row + static_cast<std::size_t>(i) * static_cast<std::size_t>(K);
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += w[k] * gj[k];
            q[static_cast<std::size_t>(i)] += acc;
        }
    }
    for (double v : q)
        if (!std::isfinite(v))
            fail(ErrorCode::numeric, "non-finite inference readout");
    return q;
}

std::vector<double> compute_drive(const DelayedWeightTensor &weights,
                                  const HistoryWindow &window, int lag) {
    check_view(window, weights.delays(), lag);
    if (static_cast<int>(window.back(lag).size()) != weights.pre_size())
        fail(ErrorCode::bounds, "window layer size does not match tensor");
    return drive_from_history(
        weights, gather_drive_history(window, weights.delays(), lag));
}

std::vector<double> compute_inference(const DelayedWeightTensor &weights,
                                      const HistoryWindow &window, int lag) {
    check_view(window, weights.delays(), lag);
    if (static_cast<int>(window.back(lag).size()) != weights.post_size())
        fail(ErrorCode::bounds, "window layer size does not match tensor");
    return inference_from_history(
        weights, gather_inference_history(window, weights.delays(), lag));
}

} // namespace sel
