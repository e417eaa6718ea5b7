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

#include "learn.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace sel {

void LearnConfig::validate() const {
    if (!(eps0_layers > 0.0) || !(eps0_heads > 0.0))
        fail(ErrorCode::config, "learning rates must be positive");
    if (noise_rate < 0.0)
        fail(ErrorCode::config, "noise rate must be non-negative");
    if (prediction_dt < 1)
        fail(ErrorCode::config, "prediction horizon must be >= 1");
    if (classification_strength <= 0.0)
        fail(ErrorCode::config, "classification strength must be positive");
}

namespace {

// w_row += coeff * history for every post row with nonzero coeff.
// Touching only the nonzero history entries is bit-identical to the
// dense loop (adding c*0 never changes a finite weight).
void rank_one_update(DelayedWeightTensor &weights,
                     const std::vector<double> &history,
                     std::span<const double> coeff) {
    if (coeff.size() != static_cast<std::size_t>(weights.post_size()))
        fail(ErrorCode::bounds, "coefficient vector size " +
                                    std::to_string(coeff.size()) +
                                    " does not match post layer size " +
                                    std::to_string(weights.post_size()));
    const std::size_t stride = weights.row_stride();
    for (const double c : coeff)
        if (!std::isfinite(c))
            fail(ErrorCode::numeric, "non-finite update coefficient");

    const auto active = active_entries(history);
    if (active.size() * 4 < stride) {
        for (int j = 0; j < weights.post_size(); ++j) {
            const double c = coeff[static_cast<std::size_t>(j)];
            if (c == 0.0) continue;
            double *row = weights.row(j);
            for (const auto &[o, v] : active) row[o] += c * v;
        }
        return;
    }

    const double *h = history.data();
    for (int j = 0; j < weights.post_size(); ++j) {
        const double c = coeff[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        double *row = weights.row(j);
        for (std::size_t o = 0; o < stride; ++o) row[o] += c * h[o];
    }
}

} // namespace

void apply_d(DelayedWeightTensor &weights, const HistoryWindow &window,
             std::span<const double> q, double eps, int lag) {
    const auto h = gather_drive_history(window, weights.delays(), lag);
    if (h.size() != weights.row_stride())
        fail(ErrorCode::bounds, "window layer size does not match tensor");
    std::vector<double> coeff(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) coeff[j] = -eps * q[j];
    rank_one_update(weights, h, coeff);
}

void apply_u(DelayedWeightTensor &weights, const HistoryWindow &window,
             std::span<const double> supervision, double eps, int lag) {
    const auto h = gather_drive_history(window, weights.delays(), lag);
    if (h.size() != weights.row_stride())
        fail(ErrorCode::bounds, "window layer size does not match tensor");
    std::vector<double> coeff(supervision.size());
    for (std::size_t j = 0; j < supervision.size(); ++j) {
        if (supervision[j] < 0.0)
            fail(ErrorCode::numeric, "supervision strength must be >= 0");
        coeff[j] = eps * supervision[j];
    }
    rank_one_update(weights, h, coeff);
}

std::vector<double> autoencoder_step(DelayedWeightTensor &weights,
                                     const TimestepFrame &input_at_start,
                                     const HistoryWindow &hidden_future,
                                     double eps) {
    const int K = weights.delays();
    if (static_cast<int>(input_at_start.size()) != weights.pre_size())
        fail(ErrorCode::bounds, "input frame size does not match tensor");
    const auto g = gather_inference_history(hidden_future, K, 0);
    if (g.size() != static_cast<std::size_t>(weights.post_size()) *
                        static_cast<std::size_t>(K))
        fail(ErrorCode::bounds, "hidden window size does not match tensor");

    std::vector<double> q = inference_from_history(weights, g);

    // Transposed rank-one update: w[j,i,k] += eps*(x_i - q_i)*g[j,k].
    const int n_pre = weights.pre_size();
    std::vector<double> coeff(static_cast<std::size_t>(n_pre));
    bool any = false;
    for (int i = 0; i < n_pre; ++i) {
        const double x = input_at_start.values[static_cast<std::size_t>(i)];
        coeff[static_cast<std::size_t>(i)] =
            eps * (x - q[static_cast<std::size_t>(i)]);
        any = any || coeff[static_cast<std::size_t>(i)] != 0.0;
    }
    if (!any) return q;
    for (int j = 0; j < weights.post_size(); ++j) {
        const double *gj = g.data() + static_cast<std::size_t>(j) *
                                          static_cast<std::size_t>(K);
        double *row = weights.row(j);
        for (int i = 0; i < n_pre; ++i) {
            const double c = coeff[static_cast<std::size_t>(i)];
            if (c == 0.0) continue;
            double *w = row + static_cast<std::size_t>(i) *
                                  static_cast<std::size_t>(K);
            for (int k = 0; k < K; ++k) w[k] += c * gj[k];
        }
    }
    return q;
}

std::vector<double> multi_drive(std::span<const HeadSource> sources,
                                int lag) {
    if (sources.empty()) fail(ErrorCode::config, "head has no sources");
    std::vector<double> total;
    for (const HeadSource &s : sources) {
        auto q = compute_drive(*s.weights, *s.window, lag);
        if (total.empty()) {
            total = std::move(q);
        } else {
            if (q.size() != total.size())
                fail(ErrorCode::bounds, "head sources disagree on post size");
            for (std::size_t j = 0; j < q.size(); ++j) total[j] += q[j];
        }
    }
    return total;
}

std::vector<double> multi_drive(std::span<const MutableHeadSource> sources,
                                int lag) {
    std::vector<HeadSource> views;
    views.reserve(sources.size());
    for (const MutableHeadSource &s : sources) views.push_back(s.view());
    return multi_drive(std::span<const HeadSource>(views), lag);
}

void supervised_head_step(std::span<const MutableHeadSource> sources,
                          std::span<const double> target, double eps,
                          int lag) {
    const std::vector<double> q = multi_drive(sources, lag);
    if (target.size() != q.size())
        fail(ErrorCode::bounds, "target frame does not match head size");
    // u then d, both against the pre-update drive; fused into the
    // equivalent combined change eps*h*(o - Q).
    std::vector<double> coeff(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (target[j] < 0.0)
            fail(ErrorCode::numeric, "supervision strength must be >= 0");
        coeff[j] = eps * (target[j] - q[j]);
    }
    for (const MutableHeadSource &s : sources) {
        const auto h =
            gather_drive_history(*s.window, s.weights->delays(), lag);
        if (h.size() != s.weights->row_stride())
            fail(ErrorCode::bounds, "window layer size does not match tensor");
        rank_one_update(*s.weights, h, coeff);
    }
}

void prediction_step(std::span<const MutableHeadSource> sources,
                     const TimestepFrame &future_input, double eps,
                     int horizon) {
    if (horizon < 1) fail(ErrorCode::config, "prediction horizon must be >= 1");
    supervised_head_step(sources, future_input.values, eps, horizon);
}

void classification_step(std::span<const MutableHeadSource> sources,
                         const TimestepFrame &label_frame, double eps) {
    supervised_head_step(sources, label_frame.values, eps, 0);
}

double epsilon_schedule(int pass_index, double eps0, bool halve) {
    if (pass_index < 0) fail(ErrorCode::config, "pass index must be >= 0");
    if (!halve) return eps0;
    return eps0 * std::exp2(static_cast<double>(-pass_index));
}

TimestepFrame inject_supervision_noise(const TimestepFrame &frame, double m,
                                       RngStream &rng) {
    if (m < 0.0) fail(ErrorCode::config, "noise rate must be non-negative");
    TimestepFrame noisy = frame;
    if (m == 0.0) return noisy;
    for (double &v : noisy.values) v += static_cast<double>(rng.poisson(m));
    return noisy;
}

double subtract_noise_baseline(double q, double m) {
    if (m < 0.0) fail(ErrorCode::config, "noise rate must be non-negative");
    return std::max(q - m, 0.0);
}

} // namespace sel
