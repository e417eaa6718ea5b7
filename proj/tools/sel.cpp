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

// sel command-line tool. Thin shell over the libsel C API: commands write
// machine-readable output to files in --out; the terminal only carries
// progress lines on stderr. Exit codes: 0 success, 1 runtime failure,
// 2 usage or configuration error.

#include <sel/sel.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void progress_to_stderr(const char *line, void *) {
    std::fprintf(stderr, "sel: %s\n", line);
}

int status_exit(sel_status s) {
    if (s == SEL_OK) return kExitOk;
    std::fprintf(stderr, "sel: %s: %s\n", sel_status_name(s),
                 sel_last_error());
    return (s == SEL_ERR_CONFIG || s == SEL_ERR_PARSE) ? kExitUsage
                                                       : kExitRuntime;
}

struct ConfigHandle {
    sel_config *ptr = nullptr;
    ~ConfigHandle() { sel_config_destroy(ptr); }
};

struct ModelHandle {
    sel_model *ptr = nullptr;
    ~ModelHandle() { sel_model_destroy(ptr); }
};

struct ReportHandle {
    sel_report *ptr = nullptr;
    ~ReportHandle() { sel_report_destroy(ptr); }
};

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string seed;
    std::string data_dir;
};

void add_common(CLI::App *cmd, CommonOpts &opts, bool with_data = true) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file");
    cmd->add_option("--set", opts.sets,
                    "override a config key, e.g. --set train.passes=2");
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "override train.seed");
    if (with_data)
        cmd->add_option("--data", opts.data_dir,
                        "dataset directory (sets data.type=files, data.dir)");
}

// Builds the resolved config from file + overrides; exits via status on
// failure.
int build_config(const CommonOpts &opts, ConfigHandle &cfg) {
    sel_status s = opts.config_path.empty()
                       ? sel_config_create(&cfg.ptr)
                       : sel_config_load(opts.config_path.c_str(), &cfg.ptr);
    if (s != SEL_OK) return status_exit(s);
    for (const std::string &kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "sel: --set expects key=value, got '%s'\n",
                         kv.c_str());
            return kExitUsage;
        }
        s = sel_config_set(cfg.ptr, kv.substr(0, eq).c_str(),
                           kv.substr(eq + 1).c_str());
        if (s != SEL_OK) return status_exit(s);
    }
    if (!opts.data_dir.empty()) {
        if ((s = sel_config_set(cfg.ptr, "data.type", "files")) != SEL_OK)
            return status_exit(s);
        if ((s = sel_config_set(cfg.ptr, "data.dir",
                                opts.data_dir.c_str())) != SEL_OK)
            return status_exit(s);
    }
    if (!opts.seed.empty()) {
        if ((s = sel_config_set(cfg.ptr, "train.seed", opts.seed.c_str())) !=
            SEL_OK)
            return status_exit(s);
    }
    return kExitOk;
}

void print_report(const sel_report *report) {
    for (size_t i = 0; i < sel_report_size(report); ++i) {
        const char *key = sel_report_key(report, i);
        double value = 0.0;
        if (sel_report_get(report, key, &value) == SEL_OK)
            std::fprintf(stderr, "sel:   %s = %g\n", key, value);
    }
}

int run_eval_single(const char *checkpoint, const sel_config *cfg,
                    const std::string &out_dir, sel_report **report) {
    ModelHandle model;
    sel_status s = sel_model_load(checkpoint, &model.ptr);
    if (s != SEL_OK) return status_exit(s);
    s = sel_eval(model.ptr, cfg, out_dir.c_str(), report,
                 progress_to_stderr, nullptr);
    if (s != SEL_OK) return status_exit(s);
    return kExitOk;
}

// Evaluating a directory of checkpoints produces the error-vs-training
// series alongside the per-checkpoint reports.
int run_eval_dir(const std::filesystem::path &dir, const sel_config *cfg,
                 const std::string &out_dir) {
    std::vector<std::filesystem::path> checkpoints;
    for (const auto &entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".selc")
            checkpoints.push_back(entry.path());
    if (checkpoints.empty()) {
        std::fprintf(stderr, "sel: no .selc checkpoints in %s\n",
                     dir.string().c_str());
        return kExitUsage;
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    struct Row {
        std::string name;
        double steps;
        double per_rec_err;
        double per_step_err;
        bool has_labels;
    };
    std::vector<Row> rows;
    for (const auto &path : checkpoints) {
        ModelHandle model;
        sel_status s = sel_model_load(path.string().c_str(), &model.ptr);
        if (s != SEL_OK) return status_exit(s);
        double steps = 0.0;
        sel_model_get(model.ptr, "trained_steps", &steps);

        ReportHandle report;
        const std::string sub =
            (std::filesystem::path(out_dir) / path.stem()).string();
        s = sel_eval(model.ptr, cfg, sub.c_str(), &report.ptr,
                     progress_to_stderr, nullptr);
        if (s != SEL_OK) return status_exit(s);

        Row row{path.filename().string(), steps, 0.0, 0.0, false};
        double acc = 0.0;
        if (sel_report_get(report.ptr, "accuracy.per_recording", &acc) ==
            SEL_OK) {
            row.per_rec_err = 1.0 - acc;
            sel_report_get(report.ptr, "accuracy.per_timestep", &acc);
            row.per_step_err = 1.0 - acc;
            row.has_labels = true;
        }
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) {
        return a.steps < b.steps;
    });

    const auto series_path =
        std::filesystem::path(out_dir) / "eval_over_training.csv";
    std::ofstream out(series_path, std::ios::trunc);
    if (!out) {
        std::fprintf(stderr, "sel: cannot write %s\n",
                     series_path.string().c_str());
        return kExitRuntime;
    }
    out << "checkpoint,trained_steps,metric,value\n";
    for (const Row &row : rows) {
        if (!row.has_labels) continue;
        out << row.name << ',' << row.steps << ",error_per_recording,"
            << row.per_rec_err << '\n';
        out << row.name << ',' << row.steps << ",error_per_timestep,"
            << row.per_step_err << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"sel - event-driven spiking network trainer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sel_version_string());

    // convert
    auto *convert = app.add_subcommand(
        "convert", "convert between canonical event file formats");
    std::string conv_in, conv_out, conv_in_fmt, conv_out_fmt;
    convert->add_option("input", conv_in, "input event file")->required();
    convert->add_option("output", conv_out, "output event file")->required();
    convert->add_option("--in-format", conv_in_fmt, "csv or bin");
    convert->add_option("--out-format", conv_out_fmt, "csv or bin");

    // synth
    auto *synth = app.add_subcommand(
        "synth", "generate a synthetic moving-pattern dataset");
    CommonOpts synth_opts;
    add_common(synth, synth_opts, false);

    // train
    auto *train = app.add_subcommand("train", "run the training schedule");
    CommonOpts train_opts;
    std::string resume_path;
    add_common(train, train_opts);
    train->add_option("--resume", resume_path,
                      "checkpoint to continue from");

    // eval
    auto *eval = app.add_subcommand(
        "eval", "evaluate a checkpoint (or a directory of checkpoints)");
    CommonOpts eval_opts;
    std::string eval_checkpoint;
    add_common(eval, eval_opts);
    eval->add_option("--checkpoint", eval_checkpoint,
                     "checkpoint file or directory")
        ->required();

    // fields
    auto *fields = app.add_subcommand(
        "fields", "export receptive/predictive field maps");
    std::string fields_checkpoint, fields_tensor = "layer1",
                fields_mode = "auto", fields_out;
    bool fields_normalize = false;
    int fields_count = 16;
    bool fields_list = false;
    fields->add_option("--checkpoint", fields_checkpoint, "checkpoint file")
        ->required();
    fields->add_option("--out", fields_out, "output directory");
    fields->add_option("--tensor", fields_tensor, "tensor name");
    fields->add_option("--mode", fields_mode,
                       "auto, receptive or predictive");
    fields->add_flag("--normalize", fields_normalize,
                     "scale each map to unit maximum magnitude");
    fields->add_option("--count", fields_count,
                       "number of maps to export (0 = all)");
    fields->add_flag("--list", fields_list, "list tensor names and exit");

    // verify
    auto *verify = app.add_subcommand(
        "verify", "run the brute-force oracle benchmarks");
    CommonOpts verify_opts;
    add_common(verify, verify_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    if (convert->parsed()) {
        uint64_t count = 0;
        const sel_status s = sel_convert(
            conv_in.c_str(),
            conv_in_fmt.empty() ? nullptr : conv_in_fmt.c_str(),
            conv_out.c_str(),
            conv_out_fmt.empty() ? nullptr : conv_out_fmt.c_str(), &count);
        if (s != SEL_OK) return status_exit(s);
        std::fprintf(stderr, "sel: converted %llu events\n",
                     static_cast<unsigned long long>(count));
        return kExitOk;
    }

    if (synth->parsed()) {
        ConfigHandle cfg;
        if (const int rc = build_config(synth_opts, cfg)) return rc;
        return status_exit(sel_synth(cfg.ptr, synth_opts.out_dir.c_str(),
                                     progress_to_stderr, nullptr));
    }

    if (train->parsed()) {
        ConfigHandle cfg;
        if (const int rc = build_config(train_opts, cfg)) return rc;
        return status_exit(sel_train(
            cfg.ptr, resume_path.empty() ? nullptr : resume_path.c_str(),
            train_opts.out_dir.c_str(), progress_to_stderr, nullptr));
    }

    if (eval->parsed()) {
        ConfigHandle cfg;
        if (const int rc = build_config(eval_opts, cfg)) return rc;
        if (std::filesystem::is_directory(eval_checkpoint))
            return run_eval_dir(eval_checkpoint, cfg.ptr, eval_opts.out_dir);
        ReportHandle report;
        const int rc = run_eval_single(eval_checkpoint.c_str(), cfg.ptr,
                                       eval_opts.out_dir, &report.ptr);
        if (rc == kExitOk) print_report(report.ptr);
        return rc;
    }

    if (fields->parsed()) {
        ModelHandle model;
        sel_status s = sel_model_load(fields_checkpoint.c_str(), &model.ptr);
        if (s != SEL_OK) return status_exit(s);
        if (fields_list) {
            for (size_t i = 0; i < sel_model_tensor_count(model.ptr); ++i)
                std::fprintf(stderr, "sel: %s\n",
                             sel_model_tensor_name(model.ptr, i));
            return kExitOk;
        }
        if (fields_out.empty()) {
            std::fprintf(stderr, "sel: --out is required\n");
            return kExitUsage;
        }
        return status_exit(sel_export_fields(
            model.ptr, fields_tensor.c_str(), fields_mode.c_str(),
            fields_normalize ? 1 : 0, fields_count, fields_out.c_str()));
    }

    if (verify->parsed()) {
        ConfigHandle cfg;
        if (const int rc = build_config(verify_opts, cfg)) return rc;
        ReportHandle report;
        const sel_status s =
            sel_verify(cfg.ptr, verify_opts.out_dir.c_str(), &report.ptr,
                       progress_to_stderr, nullptr);
        if (s != SEL_OK) return status_exit(s);
        print_report(report.ptr);
        double passed = 0.0;
        sel_report_get(report.ptr, "verify.passed", &passed);
        if (passed != 1.0) {
            std::fprintf(stderr,
                         "sel: verification FAILED (gap above tolerance)\n");
            return kExitRuntime;
        }
        std::fprintf(stderr, "sel: verification passed\n");
        return kExitOk;
    }

    return kExitUsage;
}
