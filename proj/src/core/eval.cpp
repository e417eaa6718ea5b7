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

#include "eval.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>

namespace sel {

double normalized_sse(std::span<const double> estimate,
                      std::span<const double> truth) {
    if (estimate.size() != truth.size())
        fail(ErrorCode::bounds, "estimate and truth lengths differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!std::isfinite(estimate[i]) || !std::isfinite(truth[i]))
            fail(ErrorCode::numeric, "non-finite value in SSE input");
        const double d = estimate[i] - truth[i];
        num += d * d;
        den += truth[i] * truth[i];
    }
    if (den == 0.0)
        fail(ErrorCode::undefined_metric,
             "normalized SSE undefined for an all-zero truth frame");
    return num / den;
}

int classify(std::span<const double> class_drives) {
    if (class_drives.empty())
        fail(ErrorCode::bounds, "cannot classify an empty drive vector");
    int best = 0;
    for (std::size_t c = 1; c < class_drives.size(); ++c) {
        if (!std::isfinite(class_drives[c]))
            fail(ErrorCode::numeric, "non-finite class drive");
        if (class_drives[c] > class_drives[static_cast<std::size_t>(best)])
            best = static_cast<int>(c);
    }
    if (!std::isfinite(class_drives[0]))
        fail(ErrorCode::numeric, "non-finite class drive");
    return best;
}

EvalResult evaluate_stream(const Model &model, const AssembledStream &stream,
                           const EvalOptions &options) {
    if (static_cast<int>(stream.layer_size()) != model.arch.input_size())
        fail(ErrorCode::bounds, "stream layer size does not match model");

    Runtime runtime(model);
    const int K = model.arch.delays;
    const int dt = model.prediction_dt;

    const auto class_sources = runtime.head_sources(model.classification);
    const auto pred_sources = runtime.head_sources(model.prediction);

    EvalResult r;
    struct RecordingTally {
        std::vector<double> q;
        long steps = 0;
    };
    std::map<long, RecordingTally> per_recording;

    // Predictions made at t estimate the input at t+dt and are scored
    // when that frame arrives.
    struct Pending {
        std::int64_t target_t;
        std::vector<double> raw;
    };
    std::deque<Pending> pending;

    auto clamp_rates = [&](const std::vector<double> &raw) {
        std::vector<double> v(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            double q = raw[i];
            if (options.subtract_noise)
                q = subtract_noise_baseline(q, options.noise_m);
            v[i] = std::max(q, 0.0);
        }
        return v;
    };

    double inference_sum = 0.0, inference_raw_sum = 0.0;
    double prediction_sum = 0.0, prediction_raw_sum = 0.0;

    stream.for_each([&](std::int64_t t, std::span<const double> values,
                        int label, long recording) {
        runtime.step(values, nullptr, options.hidden_scale);
        const bool warm = runtime.real_steps() >= K;

        // score the prediction that targeted this frame
        while (!pending.empty() && pending.front().target_t < t)
            pending.pop_front();
        if (!pending.empty() && pending.front().target_t == t) {
            const Pending &p = pending.front();
            double den = 0.0;
            for (double v : values) den += v * v;
            if (den == 0.0) {
                ++r.prediction_skipped;
            } else {
                const auto est = clamp_rates(p.raw);
                const double nsse = normalized_sse(est, values);
                const double nsse_raw = normalized_sse(p.raw, values);
                prediction_sum += nsse;
                prediction_raw_sum += nsse_raw;
                ++r.prediction_frames;
                if (options.keep_series) {
                    r.series.push_back({t, "prediction_nsse", nsse});
                    r.series.push_back({t, "prediction_nsse_raw", nsse_raw});
                }
            }
            pending.pop_front();
        }

        if (warm) {
            // inference of the input frame at the start of the newest
            // hidden window, from the first hidden layer
            const auto raw =
                compute_inference(model.layers[0], runtime.window(1));
            const TimestepFrame &truth = runtime.window(0).back(K - 1);
            double den = 0.0;
            for (double v : truth.values) den += v * v;
            if (den == 0.0) {
                ++r.inference_skipped;
            } else {
                const auto est = clamp_rates(raw);
                const double nsse = normalized_sse(est, truth.values);
                const double nsse_raw = normalized_sse(raw, truth.values);
                inference_sum += nsse;
                inference_raw_sum += nsse_raw;
                ++r.inference_frames;
                if (options.keep_series) {
                    r.series.push_back({t, "inference_nsse", nsse});
                    r.series.push_back({t, "inference_nsse_raw", nsse_raw});
                }
            }

            pending.push_back(
                {t + dt, multi_drive(std::span<const HeadSource>(pred_sources))});

            if (label >= 0) {
                auto qc = multi_drive(
                    std::span<const HeadSource>(class_sources));
                if (options.subtract_noise)
                    for (double &q : qc)
                        q = subtract_noise_baseline(q, options.noise_m);
                const int decided = classify(qc);
                r.has_labels = true;
                ++r.labeled_steps;
                if (decided == label) ++r.correct_steps;
                if (options.keep_series)
                    r.series.push_back(
                        {t, "classification_correct",
                         decided == label ? 1.0 : 0.0});
                if (recording >= 0) {
                    RecordingTally &tally = per_recording[recording];
                    if (tally.q.empty()) tally.q.resize(qc.size(), 0.0);
                    for (std::size_t c = 0; c < qc.size(); ++c)
                        tally.q[c] += qc[c];
                    ++tally.steps;
                }
            }
        }
    });

    if (r.labeled_steps > 0)
        r.per_timestep_accuracy = static_cast<double>(r.correct_steps) /
                                  static_cast<double>(r.labeled_steps);
    for (const auto &[ordinal, tally] : per_recording) {
        if (tally.steps == 0) continue;
        ++r.recordings;
        if (classify(tally.q) ==
            stream.recording_label(static_cast<std::size_t>(ordinal)))
            ++r.correct_recordings;
    }
    if (r.recordings > 0)
        r.per_recording_accuracy = static_cast<double>(r.correct_recordings) /
                                   static_cast<double>(r.recordings);
    if (r.inference_frames > 0) {
        r.mean_inference_nsse =
            inference_sum / static_cast<double>(r.inference_frames);
        r.mean_inference_nsse_raw =
            inference_raw_sum / static_cast<double>(r.inference_frames);
    }
    if (r.prediction_frames > 0) {
        r.mean_prediction_nsse =
            prediction_sum / static_cast<double>(r.prediction_frames);
        r.mean_prediction_nsse_raw =
            prediction_raw_sum / static_cast<double>(r.prediction_frames);
    }
    return r;
}

void write_eval_summary(const EvalResult &result,
                        const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << "metric,value\n";
    auto row = [&](const char *name, double v) {
        out << name << ',' << v << '\n';
    };
    if (result.has_labels) {
        row("accuracy.per_timestep", result.per_timestep_accuracy);
        row("accuracy.per_recording", result.per_recording_accuracy);
        row("counts.labeled_steps",
            static_cast<double>(result.labeled_steps));
        row("counts.recordings", static_cast<double>(result.recordings));
    }
    row("nsse.inference", result.mean_inference_nsse);
    row("nsse.inference_raw", result.mean_inference_nsse_raw);
    row("nsse.prediction", result.mean_prediction_nsse);
    row("nsse.prediction_raw", result.mean_prediction_nsse_raw);
    row("counts.inference_frames",
        static_cast<double>(result.inference_frames));
    row("counts.inference_skipped",
        static_cast<double>(result.inference_skipped));
    row("counts.prediction_frames",
        static_cast<double>(result.prediction_frames));
    row("counts.prediction_skipped",
        static_cast<double>(result.prediction_skipped));
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

void write_eval_series(const EvalResult &result,
                       const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << "timestep,metric,value\n";
    for (const auto &rowv : result.series)
        out << rowv.timestep << ',' << rowv.metric << ',' << rowv.value
            << '\n';
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

std::vector<FieldMap> export_fields(const DelayedWeightTensor &weights,
                                    int grid_width, int grid_height,
                                    int channels, bool predictive,
                                    bool normalize, int max_maps) {
    const int grid = grid_width * grid_height * channels;
    const int neurons = predictive ? weights.pre_size() : weights.post_size();
    const int span = predictive ? weights.post_size() : weights.pre_size();
    if (span != grid)
        fail(ErrorCode::bounds,
             (predictive ? std::string("post") : std::string("pre")) +
                 " layer size " + std::to_string(span) +
                 " does not match the " + std::to_string(grid) +
                 "-cell grid");

    const int count = max_maps > 0 ? std::min(max_maps, neurons) : neurons;
    std::vector<FieldMap> maps;
    maps.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        FieldMap map;
        map.neuron = n;
        map.width = grid_width;
        map.height = grid_height;
        map.channels = channels;
        map.values.resize(static_cast<std::size_t>(grid), 0.0);
        for (int cell = 0; cell < grid; ++cell) {
            double sum = 0.0;
            for (int k = 1; k <= weights.delays(); ++k)
                sum += predictive ? weights.at(cell, n, k)
                                  : weights.at(n, cell, k);
            map.values[static_cast<std::size_t>(cell)] = sum;
        }
        if (normalize) {
            double maxabs = 0.0;
            for (double v : map.values) maxabs = std::max(maxabs, std::abs(v));
            if (maxabs > 0.0)
                for (double &v : map.values) v /= maxabs;
        }
        maps.push_back(std::move(map));
    }
    return maps;
}

void write_fields_csv(std::span<const FieldMap> fields,
                      const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << "neuron,channel,y,x,value\n";
    for (const FieldMap &f : fields)
        for (int c = 0; c < f.channels; ++c)
            for (int y = 0; y < f.height; ++y)
                for (int x = 0; x < f.width; ++x)
                    out << f.neuron << ',' << c << ',' << y << ',' << x << ','
                        << f.at(c, y, x) << '\n';
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

void write_field_pgm(const FieldMap &field,
                     const std::filesystem::path &path) {
    double maxabs = 0.0;
    for (double v : field.values) maxabs = std::max(maxabs, std::abs(v));

    const int w = field.width * field.channels;
    const int h = field.height;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << "P5\n" << w << ' ' << h << "\n255\n";
    for (int y = 0; y < h; ++y) {
        for (int c = 0; c < field.channels; ++c) {
            for (int x = 0; x < field.width; ++x) {
                const double v = field.at(c, y, x);
                const double scaled =
                    maxabs > 0.0 ? 127.5 + 127.5 * v / maxabs : 127.5;
                const int pixel = std::clamp(
                    static_cast<int>(std::lround(scaled)), 0, 255);
                out.put(static_cast<char>(pixel));
            }
        }
    }
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

} // namespace sel
