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

// Network structure: delayed weight tensors, ReLU spiking units, forward
// drive and the time-transposed inference readout, dropout masks.

#ifndef SEL_CORE_NET_HPP
#define SEL_CORE_NET_HPP

#include "event.hpp"
#include "rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sel {

enum class LayerRole { input, hidden, prediction_head, classification_head };

struct LayerSpec {
    std::string id;
    int size = 0;
    LayerRole role = LayerRole::hidden;
};

// Weights indexed (post j, pre i, delay k in 1..K). Delay k=1 reads the
// newest frame of the pre-layer window, k=K the oldest; connections
// beyond K*tau are zero by construction. Stored row-major with k fastest.
class DelayedWeightTensor {
public:
    DelayedWeightTensor() = default;
    DelayedWeightTensor(int n_post, int n_pre, int delays);

    int post_size() const { return n_post_; }
    int pre_size() const { return n_pre_; }
    int delays() const { return k_; }

    double at(int post, int pre, int k) const; // k in 1..K
    double &at(int post, int pre, int k);

    const double *row(int post) const;
    double *row(int post);
    std::size_t row_stride() const {
        return static_cast<std::size_t>(n_pre_) *
               static_cast<std::size_t>(k_);
    }

    const std::vector<double> &data() const { return data_; }
    std::vector<double> &data() { return data_; }

    void fill_uniform(RngStream &rng, double lo, double hi);
    void fill_zero();

    // Pre/post and delay-order transposed copy; compute_drive on the
    // transposed tensor equals compute_inference on the original.
    DelayedWeightTensor transposed() const;

private:
    int n_post_ = 0;
    int n_pre_ = 0;
    int k_ = 0;
    std::vector<double> data_;
};

struct DropoutMask {
    std::vector<std::uint8_t> retained;
    double rate = 0.0;
};

// Each neuron dropped independently with probability `rate`.
DropoutMask sample_dropout_mask(int size, double rate, RngStream &rng);

double relu(double drive);

// Flattened view of the K newest frames of a window (offset by `lag`
// steps from the newest), laid out to match tensor rows:
// h[i*K + k-1] = frame value of pre-neuron i at delay k.
std::vector<double> gather_drive_history(const HistoryWindow &window,
                                         int delays, int lag = 0);

// Same K frames laid out for the reversed readout:
// g[j*K + k-1] = frame value of neuron j at the (k-1)-th frame counted
// from the start (oldest end) of the K-frame view.
std::vector<double> gather_inference_history(const HistoryWindow &window,
                                             int delays, int lag = 0);

// Q_j = sum_i sum_k w[j,i,k] * h_i(t-k+1) over the K frames ending `lag`
// steps before the newest frame.
std::vector<double> compute_drive(const DelayedWeightTensor &weights,
                                  const HistoryWindow &window, int lag = 0);

// Space- and time-transposed readout: Q_i = sum_j sum_k w[j,i,k] *
// h_j(t+k-1), where the window holds the K future frames t..t+K-1.
// Estimates the pre-layer's activity at the beginning of the view.
std::vector<double> compute_inference(const DelayedWeightTensor &weights,
                                      const HistoryWindow &window,
                                      int lag = 0);

// Kernels shared by the drive/update paths. `history` must be laid out
// by the matching gather function above.
std::vector<double> drive_from_history(const DelayedWeightTensor &weights,
                                       const std::vector<double> &history);
std::vector<double>
inference_from_history(const DelayedWeightTensor &weights,
                       const std::vector<double> &history);

// (offset, value) pairs of the nonzero history entries, in index order.
std::vector<std::pair<std::size_t, double>>
active_entries(const std::vector<double> &history);

} // namespace sel

#endif
