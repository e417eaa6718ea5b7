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

// extern-C surface of the engine. Handles wrap the core types; every
// entry point catches exceptions and maps them to status codes, with the
// detail message kept in thread-local storage.

#include "sel/sel.h"

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/data.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/model.hpp"
#include "core/oracle.hpp"
#include "core/trainer.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

struct sel_config {
    sel::Config config;
};

struct sel_model {
    sel::Model model;
    std::vector<std::string> tensor_names;
};

struct sel_report {
    std::vector<std::pair<std::string, double>> rows;
};

namespace {

thread_local std::string g_last_error;

sel_status to_status(const sel::Error &e) {
    g_last_error = e.what();
    return static_cast<sel_status>(static_cast<int>(e.code()));
}

template <typename Fn> sel_status guarded(Fn &&fn) {
    try {
        fn();
        g_last_error.clear();
        return SEL_OK;
    } catch (const sel::Error &e) {
        return to_status(e);
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return SEL_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return SEL_ERR_INTERNAL;
    }
}

void require(bool ok, const char *what) {
    if (!ok) sel::fail(sel::ErrorCode::config, what);
}

sel::ProgressFn wrap_progress(sel_progress_fn fn, void *user) {
    if (!fn) return {};
    return [fn, user](const std::string &line) { fn(line.c_str(), user); };
}

void set_report(sel_report **out,
                std::vector<std::pair<std::string, double>> rows) {
    if (!out) return;
    *out = new sel_report{std::move(rows)};
}

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

extern "C" {

const char *sel_version_string(void) { return "0.1.0"; }

const char *sel_status_name(sel_status s) {
    switch (s) {
    case SEL_OK: return "ok";
    case SEL_ERR_CONFIG: return "config error";
    case SEL_ERR_PARSE: return "parse error";
    case SEL_ERR_ORDERING: return "ordering error";
    case SEL_ERR_BOUNDS: return "bounds error";
    case SEL_ERR_GAP: return "gap error";
    case SEL_ERR_NUMERIC: return "numeric error";
    case SEL_ERR_HISTORY: return "insufficient history";
    case SEL_ERR_UNDEFINED: return "undefined metric";
    case SEL_ERR_IO: return "io error";
    case SEL_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char *sel_last_error(void) { return g_last_error.c_str(); }

void sel_string_free(char *s) { delete[] s; }

sel_status sel_config_create(sel_config **out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new sel_config{sel::Config()};
    });
}

sel_status sel_config_load(const char *path, sel_config **out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new sel_config{sel::Config::load(path)};
    });
}

sel_status sel_config_set(sel_config *cfg, const char *dotted_key,
                          const char *value) {
    return guarded([&] {
        require(cfg != nullptr && dotted_key != nullptr && value != nullptr,
                "null argument");
        cfg->config.set(dotted_key, value);
    });
}

sel_status sel_config_dump(const sel_config *cfg, char **out_json) {
    return guarded([&] {
        require(cfg != nullptr && out_json != nullptr, "null argument");
        const std::string text = cfg->config.dump(2);
        char *buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out_json = buf;
    });
}

void sel_config_destroy(sel_config *cfg) { delete cfg; }

sel_status sel_convert(const char *in_path, const char *in_format,
                       const char *out_path, const char *out_format,
                       uint64_t *out_count) {
    return guarded([&] {
        require(in_path != nullptr && out_path != nullptr, "null path");
        const auto in_fmt = in_format
                                ? sel::parse_event_format_name(in_format)
                                : sel::detect_event_format(in_path);
        const auto out_fmt = out_format
                                 ? sel::parse_event_format_name(out_format)
                                 : sel::detect_event_format(out_path);
        const auto events = sel::parse_event_file(in_path, in_fmt);
        sel::write_event_file(out_path, events, out_fmt);
        if (out_count) *out_count = events.size();
    });
}

sel_status sel_synth(const sel_config *cfg, const char *out_dir,
                     sel_progress_fn progress, void *user) {
    return guarded([&] {
        require(cfg != nullptr && out_dir != nullptr, "null argument");
        const sel::TrainConfig typed = cfg->config.typed();
        const std::size_t written =
            sel::write_synth_dataset(typed, out_dir);
        sel::write_manifest(out_dir, "synth", cfg->config);
        if (progress) {
            const std::string line =
                "wrote " + std::to_string(written) + " recordings to " +
                std::string(out_dir);
            progress(line.c_str(), user);
        }
    });
}

sel_status sel_train(const sel_config *cfg, const char *resume_checkpoint,
                     const char *out_dir, sel_progress_fn progress,
                     void *user) {
    return guarded([&] {
        require(cfg != nullptr && out_dir != nullptr, "null argument");
        const sel::TrainConfig typed = cfg->config.typed();
        sel::Trainer trainer(typed, cfg->config, sel::build_dataset(typed));
        std::filesystem::create_directories(out_dir);
        sel::write_manifest(out_dir, "train", cfg->config,
                            resume_checkpoint
                                ? std::vector<std::pair<std::string,
                                                        std::string>>{
                                      {"resume_checkpoint",
                                       resume_checkpoint}}
                                : std::vector<std::pair<std::string,
                                                        std::string>>{});
        const auto cb = wrap_progress(progress, user);
        if (resume_checkpoint)
            trainer.resume(sel::load_checkpoint(resume_checkpoint), out_dir,
                           cb);
        else
            trainer.run(out_dir, cb);
    });
}

sel_status sel_model_load(const char *path, sel_model **out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        auto *handle = new sel_model{sel::load_checkpoint(path), {}};
        handle->tensor_names = handle->model.tensor_names();
        *out = handle;
    });
}

sel_status sel_model_save(const sel_model *model, const char *path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "null argument");
        sel::save_checkpoint(model->model, path);
    });
}

void sel_model_destroy(sel_model *model) { delete model; }

size_t sel_model_tensor_count(const sel_model *model) {
    return model ? model->tensor_names.size() : 0;
}

const char *sel_model_tensor_name(const sel_model *model, size_t idx) {
    if (!model || idx >= model->tensor_names.size()) return nullptr;
    return model->tensor_names[idx].c_str();
}

sel_status sel_model_get(const sel_model *model, const char *key,
                         double *out) {
    return guarded([&] {
        require(model != nullptr && key != nullptr && out != nullptr,
                "null argument");
        const sel::Model &m = model->model;
        const std::string k(key);
        if (k == "trained_steps")
            *out = static_cast<double>(m.trained_steps);
        else if (k == "pass_index")
            *out = static_cast<double>(m.pass_index);
        else if (k == "next_layer")
            *out = static_cast<double>(m.next_layer);
        else if (k == "seed")
            *out = static_cast<double>(m.seed);
        else if (k == "delays")
            *out = static_cast<double>(m.arch.delays);
        else if (k == "hidden_count")
            *out = static_cast<double>(m.arch.hidden_count());
        else if (k == "input_size")
            *out = static_cast<double>(m.arch.input_size());
        else if (k == "prediction_dt")
            *out = static_cast<double>(m.prediction_dt);
        else if (k == "dropout_rate")
            *out = m.dropout_rate;
        else if (k == "noise_rate")
            *out = m.noise_rate;
        else
            sel::fail(sel::ErrorCode::undefined_metric,
                      "unknown model key '" + k + "'");
    });
}

sel_status sel_eval(const sel_model *model, const sel_config *cfg,
                    const char *out_dir, sel_report **out,
                    sel_progress_fn progress, void *user) {
    return guarded([&] {
        require(model != nullptr && cfg != nullptr && out_dir != nullptr,
                "null argument");
        const sel::TrainConfig typed = cfg->config.typed();
        if (typed.input_size() != model->model.arch.input_size())
            sel::fail(sel::ErrorCode::config,
                      "configured input size does not match the model");

        const sel::Dataset dataset = sel::build_dataset(typed);
        const sel::Split split = sel::split_train_test(
            dataset, typed.train_per_class, typed.test_per_class);
        std::vector<const sel::Recording *> recs = split.test;
        if (typed.eval_max_recordings > 0 &&
            static_cast<int>(recs.size()) > typed.eval_max_recordings)
            recs.resize(static_cast<std::size_t>(typed.eval_max_recordings));

        sel::RngStream order_rng(typed.seed, "eval/order");
        const sel::AssembledStream stream = sel::assemble_stream(
            recs, typed.gap, order_rng,
            static_cast<std::size_t>(typed.input_size()));

        sel::EvalOptions options;
        options.hidden_scale = 1.0 - model->model.dropout_rate;
        options.subtract_noise = typed.eval_subtract_noise;
        options.noise_m = model->model.noise_rate;
        const sel::EvalResult result =
            sel::evaluate_stream(model->model, stream, options);

        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        sel::write_eval_summary(result, dir / "eval_summary.csv");
        sel::write_eval_series(result, dir / "eval_series.csv");
        sel::write_manifest(dir, "eval", cfg->config);

        std::vector<std::pair<std::string, double>> rows;
        if (result.has_labels) {
            rows.emplace_back("accuracy.per_timestep",
                              result.per_timestep_accuracy);
            rows.emplace_back("accuracy.per_recording",
                              result.per_recording_accuracy);
            rows.emplace_back("counts.labeled_steps",
                              static_cast<double>(result.labeled_steps));
            rows.emplace_back("counts.recordings",
                              static_cast<double>(result.recordings));
        }
        rows.emplace_back("nsse.inference", result.mean_inference_nsse);
        rows.emplace_back("nsse.inference_raw",
                          result.mean_inference_nsse_raw);
        rows.emplace_back("nsse.prediction", result.mean_prediction_nsse);
        rows.emplace_back("nsse.prediction_raw",
                          result.mean_prediction_nsse_raw);
        rows.emplace_back("counts.inference_frames",
                          static_cast<double>(result.inference_frames));
        rows.emplace_back("counts.prediction_frames",
                          static_cast<double>(result.prediction_frames));
        set_report(out, std::move(rows));

        if (progress) {
            std::ostringstream os;
            os << "evaluated " << result.recordings << " recordings";
            if (result.has_labels)
                os << ", per-recording accuracy "
                   << result.per_recording_accuracy;
            progress(os.str().c_str(), user);
        }
    });
}

sel_status sel_export_fields(const sel_model *model, const char *tensor,
                             const char *mode, int normalize, int max_maps,
                             const char *out_dir) {
    return guarded([&] {
        require(model != nullptr && tensor != nullptr && out_dir != nullptr,
                "null argument");
        const sel::DelayedWeightTensor *w =
            model->model.find_tensor(tensor);
        if (!w)
            sel::fail(sel::ErrorCode::config,
                      "unknown tensor '" + std::string(tensor) + "'");

        const std::string tensor_name(tensor);
        std::string mode_name = mode ? mode : "auto";
        if (mode_name == "auto")
            mode_name = tensor_name.rfind("prediction:", 0) == 0
                            ? "predictive"
                            : "receptive";
        bool predictive;
        if (mode_name == "predictive")
            predictive = true;
        else if (mode_name == "receptive")
            predictive = false;
        else
            sel::fail(sel::ErrorCode::config,
                      "mode must be auto, receptive or predictive");

        const sel::Architecture &arch = model->model.arch;
        const auto maps = sel::export_fields(
            *w, arch.input_width, arch.input_height, arch.polarities,
            predictive, normalize != 0, max_maps);

        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        std::string base = tensor_name;
        for (char &c : base)
            if (c == ':') c = '_';
        sel::write_fields_csv(maps,
                              dir / ("fields_" + base + "_" + mode_name +
                                     ".csv"));
        for (const sel::FieldMap &map : maps) {
            std::ostringstream name;
            name << "field_" << base << '_' << mode_name << '_'
                 << (map.neuron < 100 ? "0" : "")
                 << (map.neuron < 10 ? "0" : "") << map.neuron << ".pgm";
            sel::write_field_pgm(map, dir / name.str());
        }
    });
}

sel_status sel_verify(const sel_config *cfg, const char *out_dir,
                      sel_report **out, sel_progress_fn progress,
                      void *user) {
    return guarded([&] {
        require(cfg != nullptr && out_dir != nullptr, "null argument");
        const sel::TrainConfig c = cfg->config.typed();
        const auto cb = wrap_progress(progress, user);

        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        std::ofstream report_csv(dir / "report.csv", std::ios::trunc);
        if (!report_csv)
            sel::fail(sel::ErrorCode::io,
                      "cannot write " + (dir / "report.csv").string());
        report_csv << "benchmark,context,oracle_rate,learned_q,gap,"
                      "tolerance,status\n";

        std::vector<std::pair<std::string, double>> rows;
        double max_gap = 0.0;
        bool passed = true;

        auto record = [&](const std::string &benchmark,
                          const std::string &context, double oracle,
                          double learned, double gap, bool thresholded) {
            const bool ok = gap <= c.verify_tolerance;
            if (thresholded) {
                max_gap = std::max(max_gap, gap);
                passed = passed && ok;
            }
            report_csv << benchmark << ',' << context << ',' << oracle << ','
                       << learned << ',' << gap << ',' << c.verify_tolerance
                       << ','
                       << (thresholded ? (ok ? "pass" : "fail") : "info")
                       << '\n';
            const std::string prefix = benchmark +
                                       (context.empty() ? "" : "." + context);
            rows.emplace_back(prefix + ".oracle", oracle);
            rows.emplace_back(prefix + ".learned_q", learned);
            rows.emplace_back(prefix + ".gap", gap);
            if (cb)
                cb(benchmark + " " + context + ": oracle=" +
                   format_double(oracle) + " learned=" +
                   format_double(learned) + " gap=" + format_double(gap));
        };

        for (double p : c.verify_bernoulli_p) {
            const auto r = sel::run_bernoulli_benchmark(
                p, c.verify_steps, c.verify_eps, c.seed, 0.0,
                c.verify_early_stop);
            record("bernoulli", "p=" + format_double(p), r.oracle_rate,
                   r.learned_q, r.gap, true);
        }

        {
            const auto r = sel::run_two_context_benchmark(
                c.verify_two_context_pa, c.verify_two_context_pb,
                c.verify_steps, c.verify_eps, c.seed, false);
            for (const auto &outcome : r.outcomes)
                record("two_context", outcome.context, outcome.oracle_rate,
                       outcome.learned_q, outcome.gap, true);
        }

        if (c.verify_noise_m > 0.0 && !c.verify_bernoulli_p.empty()) {
            const double p = c.verify_bernoulli_p.front();
            const auto r = sel::run_bernoulli_benchmark(
                p, c.verify_steps, c.verify_eps, c.seed, c.verify_noise_m,
                c.verify_early_stop);
            record("noise_floor",
                   "p=" + format_double(p) + ",m=" +
                       format_double(c.verify_noise_m),
                   r.oracle_rate, r.learned_q, r.gap, true);
        }

        if (c.verify_overlap_demo) {
            // shared-parameter interference; reported without a threshold
            const auto r = sel::run_two_context_benchmark(
                c.verify_two_context_pa, c.verify_two_context_pb,
                c.verify_steps, c.verify_eps, c.seed, true);
            for (const auto &outcome : r.outcomes)
                record("overlap", outcome.context, outcome.oracle_rate,
                       outcome.learned_q, outcome.gap, false);
        }

        if (!report_csv)
            sel::fail(sel::ErrorCode::io,
                      "write failed for " + (dir / "report.csv").string());
        sel::write_manifest(dir, "verify", cfg->config);

        rows.emplace_back("verify.max_gap", max_gap);
        rows.emplace_back("verify.passed", passed ? 1.0 : 0.0);
        set_report(out, std::move(rows));
    });
}

size_t sel_report_size(const sel_report *report) {
    return report ? report->rows.size() : 0;
}

const char *sel_report_key(const sel_report *report, size_t idx) {
    if (!report || idx >= report->rows.size()) return nullptr;
    return report->rows[idx].first.c_str();
}

sel_status sel_report_get(const sel_report *report, const char *key,
                          double *out) {
    return guarded([&] {
        require(report != nullptr && key != nullptr && out != nullptr,
                "null argument");
        for (const auto &[k, v] : report->rows) {
            if (k == key) {
                *out = v;
                return;
            }
        }
        sel::fail(sel::ErrorCode::undefined_metric,
                  "report has no entry '" + std::string(key) + "'");
    });
}

void sel_report_destroy(sel_report *report) { delete report; }

} // extern "C"
