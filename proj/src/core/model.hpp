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

// Whole-network state: architecture, inter-layer weight tensors, head
// tensors, and the per-layer activity windows advanced by forward steps.

#ifndef SEL_CORE_MODEL_HPP
#define SEL_CORE_MODEL_HPP

#include "config.hpp"
#include "learn.hpp"
#include "net.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sel {

inline constexpr int kClassCount = 10;

struct Architecture {
    int input_width = 23;
    int input_height = 23;
    int polarities = 2;
    std::vector<int> hidden;
    int delays = 5;
    std::int64_t tau_us = 30000;

    int input_size() const { return input_width * input_height * polarities; }
    int hidden_count() const { return static_cast<int>(hidden.size()); }
    // 0 = input layer, 1..L = hidden layers
    int layer_size(int layer) const;
    std::vector<LayerSpec> layer_specs() const;
};

// Head tensors, one per source layer (input first, then each hidden).
struct HeadGroup {
    std::string name;
    int size = 0;
    std::vector<DelayedWeightTensor> per_source;
};

struct Model {
    Architecture arch;
    // layers[l] connects layer l (pre) to hidden layer l+1 (post)
    std::vector<DelayedWeightTensor> layers;
    HeadGroup prediction;
    HeadGroup classification;

    int prediction_dt = 15;
    double dropout_rate = 0.5;
    double noise_rate = 0.0;
    double eps0_layers = 1e-5;
    double eps0_heads = 2.5e-6;
    bool halve_per_pass = true;

    // training position (layer passes completed so far)
    int pass_index = 0;
    int next_layer = 1; // 1-based hidden layer the next pass trains
    std::int64_t trained_steps = 0;
    std::uint64_t seed = 1;

    std::string config_json; // resolved config captured at initialization

    static Model init(const TrainConfig &cfg, const Config &resolved);

    std::vector<std::string> tensor_names() const;
    const DelayedWeightTensor *find_tensor(const std::string &name) const;
    DelayedWeightTensor *find_tensor(const std::string &name);
};

// Per-layer ring buffers deep enough for the prediction horizon. After
// reset every window is pre-filled with zero frames (silence before the
// stream), so drives are defined from the first step; real_steps tracks
// how much genuine history has been seen for warm-up decisions.
class Runtime {
public:
    explicit Runtime(const Model &model);

    void reset(std::int64_t t0 = 0);

    // Advance one timestep: push the input frame, then compute each
    // hidden layer bottom-up as relu(drive), masked by dropout when a
    // mask is present, and scaled by hidden_scale (evaluation-time
    // dropout compensation).
    void step(std::span<const double> input_values,
              const std::vector<std::optional<DropoutMask>> *masks = nullptr,
              double hidden_scale = 1.0);

    const HistoryWindow &window(int layer) const;
    std::int64_t now() const { return next_t_ - 1; }
    long real_steps() const { return real_steps_; }

    std::vector<HeadSource> head_sources(const HeadGroup &head) const;
    std::vector<MutableHeadSource> mutable_head_sources(HeadGroup &head) const;

private:
    const Model *model_;
    std::vector<HistoryWindow> windows_;
    std::int64_t next_t_ = 0;
    long real_steps_ = 0;
};

} // namespace sel

#endif
