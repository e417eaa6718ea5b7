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

// The two event-triggered weight update rules and their composition into
// the autoencoder, prediction and classification steps.
//
// Rule d runs on every occurrence of an activity window H and nudges the
// drive down:   w <- w - eps * h * Q.
// Rule u runs on every supervision spike o co-occurring with H and nudges
// the drive up:  w <- w + eps * h * o.
// Their balance point is the empirical conditional rate of the
// supervision given H. Within one timestep u and d both use the drive
// computed before either update, so the pair is equivalent to the
// combined change eps * h * (o - Q).

#ifndef SEL_CORE_LEARN_HPP
#define SEL_CORE_LEARN_HPP

#include "event.hpp"
#include "net.hpp"
#include "rng.hpp"

#include <span>
#include <vector>

namespace sel {

struct LearnConfig {
    double eps0_layers = 1e-5;
    double eps0_heads = 2.5e-6;
    bool halve_per_pass = true;
    double noise_rate = 0.0;           // expected supervision-noise spikes
    int prediction_dt = 15;            // prediction horizon in timesteps
    double classification_strength = 1.0;

    void validate() const;
};

// w[j,i,k] <- w[j,i,k] - eps * h_i(t-k+1) * q[j], once per occurrence of
// the window view (K frames ending `lag` steps before the newest).
// `q` must be the pre-update drive of the same view.
void apply_d(DelayedWeightTensor &weights, const HistoryWindow &window,
             std::span<const double> q, double eps, int lag = 0);

// w[j,i,k] <- w[j,i,k] + eps * h_i(t-k+1) * o_j for supervision spike
// strengths o; a zero entry means no spike and leaves its row unchanged.
void apply_u(DelayedWeightTensor &weights, const HistoryWindow &window,
             std::span<const double> supervision, double eps, int lag = 0);

// One self-supervision step of the layer autoencoder. The window holds
// the hidden layer's K future frames relative to the input frame at the
// view's start; d and u are applied over the transposed indexing with
// the pre-update inference readout, i.e. the net per-weight change is
// eps * h_j(t+k-1) * (x_i - Q_i). Returns the readout used.
std::vector<double> autoencoder_step(DelayedWeightTensor &weights,
                                     const TimestepFrame &input_at_start,
                                     const HistoryWindow &hidden_future,
                                     double eps);

// A supervised head reads several source layers at once; its drive is
// the sum of the per-source drives and both rules share that total.
struct HeadSource {
    const DelayedWeightTensor *weights = nullptr;
    const HistoryWindow *window = nullptr;
};

struct MutableHeadSource {
    DelayedWeightTensor *weights = nullptr;
    const HistoryWindow *window = nullptr;

    HeadSource view() const { return {weights, window}; }
};

std::vector<double> multi_drive(std::span<const HeadSource> sources,
                                int lag = 0);
std::vector<double> multi_drive(std::span<const MutableHeadSource> sources,
                                int lag = 0);

// d with the drive of the window that ended `lag` steps ago, u with the
// current target frame (the activity the head should have produced).
// Covers both heads: prediction uses lag = prediction horizon,
// classification uses lag = 0 with the label frame as target.
void supervised_head_step(std::span<const MutableHeadSource> sources,
                          std::span<const double> target, double eps,
                          int lag);

void prediction_step(std::span<const MutableHeadSource> sources,
                     const TimestepFrame &future_input, double eps,
                     int horizon);

void classification_step(std::span<const MutableHeadSource> sources,
                         const TimestepFrame &label_frame, double eps);

// eps0 * 2^-pass while halving is enabled, else eps0.
double epsilon_schedule(int pass_index, double eps0, bool halve = true);

// Adds an independent Poisson(m) count of unit spikes to every
// supervised neuron; keeps the learned rate bounded away from zero.
TimestepFrame inject_supervision_noise(const TimestepFrame &frame, double m,
                                       RngStream &rng);

// Removes the noise floor from a learned rate readout: max(q - m, 0).
double subtract_noise_baseline(double q, double m);

} // namespace sel

#endif
