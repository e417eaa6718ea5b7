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

#include "trainer.hpp"

#include "checkpoint.hpp"
#include "error.hpp"
#include "eval.hpp"

#include <fstream>
#include <sstream>

namespace sel {

namespace {

class MetricsLog {
public:
    MetricsLog(const std::filesystem::path &path, bool fresh) : path_(path) {
        const bool write_header = fresh || !std::filesystem::exists(path);
        out_.open(path, fresh ? std::ios::trunc : std::ios::app);
        if (!out_) fail(ErrorCode::io, "cannot write " + path.string());
        if (write_header) out_ << "timestep,pass,layer,metric,value\n";
    }

    void row(std::int64_t timestep, int pass, int layer,
             const std::string &metric, double value) {
        out_ << timestep << ',' << pass << ',' << layer << ',' << metric
             << ',' << value << '\n';
        out_.flush();
        if (!out_) fail(ErrorCode::io, "write failed for " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string checkpoint_name(int pass, int layer) {
    std::ostringstream os;
    os << "ckpt-p" << (pass < 10 ? "0" : "") << pass << "-l" << layer
       << ".selc";
    return os.str();
}

std::string synth_recording_id(int class_id, int index) {
    std::ostringstream os;
    os << "rec_c" << class_id << '_' << (index < 1000 ? "0" : "")
       << (index < 100 ? "0" : "") << (index < 10 ? "0" : "") << index;
    return os.str();
}

SynthRecording make_synth_recording(const TrainConfig &cfg, int class_id,
                                    int index) {
    RngStream rng(cfg.seed, "synth/class" + std::to_string(class_id) +
                                "/rec" + std::to_string(index));
    return synth_moving_pattern(class_id, cfg.synth_length, cfg.synth_noise,
                                rng, cfg.mapping(), cfg.tau_us);
}

} // namespace

Dataset build_dataset(const TrainConfig &cfg) {
    if (cfg.data_type == "files") {
        if (cfg.data_dir.empty())
            fail(ErrorCode::config, "data.dir is required for data.type=files");
        return load_dataset(cfg.data_dir, cfg.mapping(), cfg.tau_us);
    }
    // synth: generated in class-major order, one stream per recording so
    // cmd_synth files and the in-memory dataset match exactly.
    Dataset dataset;
    for (int cl : cfg.synth_classes) {
        for (int n = 0; n < cfg.synth_count; ++n) {
            const SynthRecording synth = make_synth_recording(cfg, cl, n);
            dataset.recordings.push_back(
                bin_synth_recording(synth, cfg.mapping(), cfg.tau_us,
                                    synth_recording_id(cl, n)));
        }
    }
    if (dataset.recordings.empty())
        fail(ErrorCode::config, "synthetic dataset is empty");
    return dataset;
}

std::size_t write_synth_dataset(const TrainConfig &cfg,
                                const std::filesystem::path &out_dir) {
    std::filesystem::create_directories(out_dir);
    const EventFileFormat format = parse_event_format_name(cfg.synth_format);
    const std::string ext = format == EventFileFormat::csv ? ".csv" : ".selev";

    std::ofstream manifest(out_dir / "manifest.csv", std::ios::trunc);
    if (!manifest)
        fail(ErrorCode::io,
             "cannot write " + (out_dir / "manifest.csv").string());

    std::size_t written = 0;
    for (int cl : cfg.synth_classes) {
        for (int n = 0; n < cfg.synth_count; ++n) {
            const SynthRecording synth = make_synth_recording(cfg, cl, n);
            const std::string file = synth_recording_id(cl, n) + ext;
            write_event_file(out_dir / file, synth.events, format);
            manifest << file << ',' << synth.label << '\n';
            ++written;
        }
    }
    if (!manifest)
        fail(ErrorCode::io,
             "write failed for " + (out_dir / "manifest.csv").string());
    return written;
}

Trainer::Trainer(TrainConfig cfg, Config resolved, Dataset dataset)
    : cfg_(std::move(cfg)), resolved_(std::move(resolved)),
      dataset_(std::move(dataset)) {
    for (const Recording &rec : dataset_.recordings) {
        if (rec.label < 0 || rec.label >= kClassCount)
            fail(ErrorCode::config,
                 "recording " + rec.id + " label " +
                     std::to_string(rec.label) + " outside 0.." +
                     std::to_string(kClassCount - 1));
        for (const TimestepFrame &f : rec.frames)
            if (static_cast<int>(f.size()) != cfg_.input_size())
                fail(ErrorCode::bounds,
                     "recording " + rec.id + " frame size mismatch");
    }
    split_ = split_train_test(dataset_, cfg_.train_per_class,
                              cfg_.test_per_class);
}

Model Trainer::run(const std::filesystem::path &out_dir,
                   const ProgressFn &progress) {
    return run_schedule(Model::init(cfg_, resolved_), out_dir, progress,
                        true);
}

Model Trainer::resume(Model model, const std::filesystem::path &out_dir,
                      const ProgressFn &progress) {
    if (model.arch.hidden != cfg_.hidden ||
        model.arch.input_size() != cfg_.input_size() ||
        model.arch.delays != cfg_.delays)
        fail(ErrorCode::config,
             "checkpoint architecture does not match the configuration");
    // the continued run is owned by the resuming configuration
    model.config_json = resolved_.dump(0);
    model.seed = cfg_.seed;
    return run_schedule(std::move(model), out_dir, progress, false);
}

Model Trainer::run_schedule(Model model, const std::filesystem::path &out_dir,
                            const ProgressFn &progress, bool fresh_metrics) {
    std::filesystem::create_directories(out_dir);
    MetricsLog log(out_dir / "metrics.csv", fresh_metrics);
    const int layer_count = model.arch.hidden_count();

    auto all_passes = [&] {
    for (int pass = model.pass_index; pass < cfg_.passes; ++pass) {
        const double eps_layers = epsilon_schedule(
            pass, cfg_.learn.eps0_layers, cfg_.learn.halve_per_pass);
        const double eps_heads = epsilon_schedule(
            pass, cfg_.learn.eps0_heads, cfg_.learn.halve_per_pass);
        const int start_layer =
            pass == model.pass_index ? model.next_layer : 1;
        for (int layer = start_layer; layer <= layer_count; ++layer) {
            const PassMetrics metrics =
                layer_pass(model, pass, layer, eps_layers, eps_heads);

            if (layer == layer_count) {
                model.pass_index = pass + 1;
                model.next_layer = 1;
            } else {
                model.pass_index = pass;
                model.next_layer = layer + 1;
            }

            log.row(model.trained_steps, pass, layer, "train_inference_nsse",
                    metrics.train_inference_nsse);
            log.row(model.trained_steps, pass, layer, "prediction_skipped",
                    static_cast<double>(metrics.prediction_skipped));
            log.row(model.trained_steps, pass, layer,
                    "classification_skipped",
                    static_cast<double>(metrics.classification_skipped));

            if (cfg_.probe_recordings > 0 && !split_.test.empty()) {
                const std::size_t n =
                    std::min<std::size_t>(split_.test.size(),
                                          static_cast<std::size_t>(
                                              cfg_.probe_recordings));
                std::vector<const Recording *> probe(
                    split_.test.begin(),
                    split_.test.begin() + static_cast<std::ptrdiff_t>(n));
                RngStream probe_rng(cfg_.seed, "probe/order");
                const AssembledStream probe_stream = assemble_stream(
                    probe, cfg_.gap, probe_rng,
                    static_cast<std::size_t>(cfg_.input_size()));
                EvalOptions options;
                options.hidden_scale = 1.0 - cfg_.dropout;
                options.keep_series = false;
                const EvalResult probe_result =
                    evaluate_stream(model, probe_stream, options);
                if (probe_result.has_labels) {
                    log.row(model.trained_steps, pass, layer,
                            "probe_error_per_recording",
                            1.0 - probe_result.per_recording_accuracy);
                    log.row(model.trained_steps, pass, layer,
                            "probe_error_per_timestep",
                            1.0 - probe_result.per_timestep_accuracy);
                }
            }

            const int completed = pass * layer_count + layer;
            if (cfg_.checkpoint_every > 0 &&
                completed % cfg_.checkpoint_every == 0)
                save_checkpoint(model, out_dir / checkpoint_name(pass, layer));

            if (progress) {
                std::ostringstream os;
                os << "pass " << pass << " layer " << layer
                   << " done: steps=" << model.trained_steps
                   << " train_inference_nsse="
                   << metrics.train_inference_nsse;
                progress(os.str());
            }
        }
    }
    };

    try {
        all_passes();
    } catch (...) {
        // keep whatever was learned so the run can be inspected or resumed
        save_checkpoint(model, out_dir / "ckpt-aborted.selc");
        throw;
    }

    save_checkpoint(model, out_dir / "model.selc");
    return model;
}

PassMetrics Trainer::layer_pass(Model &model, int pass, int layer,
                                double eps_layers, double eps_heads) {
    const int K = model.arch.delays;
    const int dt = model.prediction_dt;
    const int layer_count = model.arch.hidden_count();
    const std::string suffix =
        "/pass" + std::to_string(pass) + "/layer" + std::to_string(layer);

    RngStream order_rng(cfg_.seed, "order" + suffix);
    RngStream dropout_rng(cfg_.seed, "dropout" + suffix);
    RngStream noise_rng(cfg_.seed, "noise" + suffix);

    const AssembledStream stream =
        assemble_stream(split_.train, cfg_.gap, order_rng,
                        static_cast<std::size_t>(cfg_.input_size()));
    if (stream.length() < K + 1)
        fail(ErrorCode::config,
             "training stream has " + std::to_string(stream.length()) +
                 " frames, need at least " + std::to_string(K + 1));

    Runtime runtime(model);
    DelayedWeightTensor &tensor =
        model.layers[static_cast<std::size_t>(layer - 1)];
    auto class_sources = runtime.mutable_head_sources(model.classification);
    auto pred_sources = runtime.mutable_head_sources(model.prediction);

    PassMetrics metrics;
    double nsse_sum = 0.0;
    std::vector<std::optional<DropoutMask>> masks(
        static_cast<std::size_t>(layer_count));

    stream.for_each([&](std::int64_t, std::span<const double> values,
                        int label, long) {
        // dropout only on the layer being trained; lower layers are
        // already trained and upper layers are not yet
        if (cfg_.dropout > 0.0)
            masks[static_cast<std::size_t>(layer - 1)] = sample_dropout_mask(
                model.arch.layer_size(layer), cfg_.dropout, dropout_rng);
        runtime.step(values, &masks, 1.0);

        // self-supervised autoencoder update of the (layer-1, layer) pair
        const TimestepFrame &input_at_start =
            runtime.window(layer - 1).back(K - 1);
        const auto readout = autoencoder_step(
            tensor, input_at_start, runtime.window(layer), eps_layers);
        double den = 0.0;
        for (double v : input_at_start.values) den += v * v;
        if (den > 0.0) {
            double clamped_nsse = 0.0; // rates are non-negative
            for (std::size_t i = 0; i < readout.size(); ++i) {
                const double est = std::max(readout[i], 0.0);
                const double d = est - input_at_start.values[i];
                clamped_nsse += d * d;
            }
            nsse_sum += clamped_nsse / den;
            ++metrics.inference_frames;
        }

        // heads train at every timestep once their buffers are warm
        if (runtime.real_steps() >= K) {
            TimestepFrame label_frame(runtime.now(), kClassCount);
            if (label >= 0)
                label_frame.values[static_cast<std::size_t>(label)] =
                    cfg_.learn.classification_strength;
            if (cfg_.learn.noise_rate > 0.0)
                label_frame = inject_supervision_noise(
                    label_frame, cfg_.learn.noise_rate, noise_rng);
            classification_step(
                std::span<const MutableHeadSource>(class_sources),
                label_frame, eps_heads);
        } else {
            ++metrics.classification_skipped;
        }

        if (runtime.real_steps() >= K + dt) {
            TimestepFrame target(runtime.now(), values.size());
            std::copy(values.begin(), values.end(), target.values.begin());
            if (cfg_.learn.noise_rate > 0.0)
                target = inject_supervision_noise(
                    target, cfg_.learn.noise_rate, noise_rng);
            prediction_step(std::span<const MutableHeadSource>(pred_sources),
                            target, eps_heads, dt);
        } else {
            ++metrics.prediction_skipped;
        }

        ++model.trained_steps;
    });

    if (metrics.inference_frames > 0)
        metrics.train_inference_nsse =
            nsse_sum / static_cast<double>(metrics.inference_frames);
    return metrics;
}

} // namespace sel
