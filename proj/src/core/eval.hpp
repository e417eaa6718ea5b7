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

// Evaluation readouts: classification accuracy per timestep and per
// recording, normalized SSE of the inference and prediction estimates,
// and receptive/predictive field export.

#ifndef SEL_CORE_EVAL_HPP
#define SEL_CORE_EVAL_HPP

#include "data.hpp"
#include "model.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sel {

// sum_i (estimate_i - truth_i)^2 / sum_i truth_i^2; undefined for an
// all-zero truth frame.
double normalized_sse(std::span<const double> estimate,
                      std::span<const double> truth);

// Index of the maximum; ties break toward the lowest index.
int classify(std::span<const double> class_drives);

struct EvalOptions {
    double hidden_scale = 1.0;   // evaluation-time dropout compensation
    bool subtract_noise = false; // remove the supervision noise floor
    double noise_m = 0.0;
    bool keep_series = true;     // collect the per-timestep metric rows
};

struct EvalResult {
    bool has_labels = false;
    long labeled_steps = 0;
    long correct_steps = 0;
    long recordings = 0;
    long correct_recordings = 0;
    double per_timestep_accuracy = 0.0;
    double per_recording_accuracy = 0.0;

    long inference_frames = 0;
    long inference_skipped = 0; // all-zero-truth frames, metric undefined
    double mean_inference_nsse = 0.0;
    double mean_inference_nsse_raw = 0.0; // unclamped readout

    long prediction_frames = 0;
    long prediction_skipped = 0;
    double mean_prediction_nsse = 0.0;
    double mean_prediction_nsse_raw = 0.0;

    struct SeriesRow {
        std::int64_t timestep;
        std::string metric;
        double value;
    };
    std::vector<SeriesRow> series;
};

EvalResult evaluate_stream(const Model &model, const AssembledStream &stream,
                           const EvalOptions &options = {});

void write_eval_summary(const EvalResult &result,
                        const std::filesystem::path &path);
void write_eval_series(const EvalResult &result,
                       const std::filesystem::path &path);

// One grid of delay-summed weights per neuron, on the input geometry.
struct FieldMap {
    int neuron = 0;
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> values; // indexed like input neurons

    double at(int channel, int y, int x) const {
        return values[static_cast<std::size_t>(channel * width * height +
                                               y * width + x)];
    }
};

// Receptive mode sums a post-neuron's incoming weights over delays and
// lays them out on the pre (input) grid; predictive mode does the same
// for a pre-neuron's outgoing weights on the post grid. With normalize,
// each map is scaled to a maximum absolute value of 1 (zero maps are
// left untouched).
std::vector<FieldMap> export_fields(const DelayedWeightTensor &weights,
                                    int grid_width, int grid_height,
                                    int channels, bool predictive,
                                    bool normalize, int max_maps = 0);

void write_fields_csv(std::span<const FieldMap> fields,
                      const std::filesystem::path &path);
// 8-bit PGM, channels side by side, midpoint gray at zero weight.
void write_field_pgm(const FieldMap &field,
                     const std::filesystem::path &path);

} // namespace sel

#endif
