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

// The training schedule: layerwise autoencoder passes over the training
// stream, heads trained at every timestep, epsilon halved after each
// sweep through the hidden layers, checkpoints at layer-pass boundaries.

#ifndef SEL_CORE_TRAINER_HPP
#define SEL_CORE_TRAINER_HPP

#include "config.hpp"
#include "data.hpp"
#include "model.hpp"

#include <filesystem>
#include <functional>

namespace sel {

using ProgressFn = std::function<void(const std::string &)>;

// Builds the dataset named by the config: "files" loads data.dir,
// "synth" generates the configured moving-pattern recordings in memory
// (the same recordings cmd_synth writes to disk for that seed).
Dataset build_dataset(const TrainConfig &cfg);

// Writes the configured synthetic dataset as event files plus
// manifest.csv; loading the directory back yields build_dataset's
// recordings exactly. Returns the number of recordings written.
std::size_t write_synth_dataset(const TrainConfig &cfg,
                                const std::filesystem::path &out_dir);

struct PassMetrics {
    double train_inference_nsse = 0.0;
    long inference_frames = 0;
    long prediction_skipped = 0;
    long classification_skipped = 0;
};

class Trainer {
public:
    Trainer(TrainConfig cfg, Config resolved, Dataset dataset);

    // Full schedule from a fresh model; writes checkpoints, metrics.csv.
    Model run(const std::filesystem::path &out_dir,
              const ProgressFn &progress = {});

    // Continue a checkpointed model at its recorded (pass, layer)
    // position; bit-identical to the uninterrupted run.
    Model resume(Model model, const std::filesystem::path &out_dir,
                 const ProgressFn &progress = {});

    const Split &split() const { return split_; }

private:
    Model run_schedule(Model model, const std::filesystem::path &out_dir,
                       const ProgressFn &progress, bool fresh_metrics);
    PassMetrics layer_pass(Model &model, int pass, int layer,
                           double eps_layers, double eps_heads);

    TrainConfig cfg_;
    Config resolved_;
    Dataset dataset_;
    Split split_;
};

} // namespace sel

#endif
