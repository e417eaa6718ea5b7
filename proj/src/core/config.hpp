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

// Run configuration: a JSON tree with fixed schema. Files and dotted-key
// overrides may only touch keys that exist in the defaults; unknown keys
// are rejected.

#ifndef SEL_CORE_CONFIG_HPP
#define SEL_CORE_CONFIG_HPP

#include "data.hpp"
#include "learn.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sel {

struct TrainConfig {
    // arch
    int input_width = 23;
    int input_height = 23;
    int polarities = 2;
    std::vector<int> hidden = {1000, 1000, 1000};
    int delays = 5;
    std::int64_t tau_us = 30000;

    LearnConfig learn;

    // train
    int passes = 3;
    double dropout = 0.5;
    std::uint64_t seed = 1;
    int checkpoint_every = 1; // in layer passes; 0 disables intermediates
    int probe_recordings = 20; // held-out probe size per layer pass; 0 skips

    // data
    std::string data_type = "files"; // "files" or "synth"
    std::string data_dir;
    int gap = 15;
    int train_per_class = 900;
    int test_per_class = 100;
    int crop_x = 52;
    int crop_y = 52;

    // synth
    std::vector<int> synth_classes = {0, 1};
    int synth_count = 50;
    int synth_length = 60;
    double synth_noise = 0.01;
    std::string synth_format = "csv";

    // eval
    int eval_max_recordings = 0; // 0 = all test recordings
    bool eval_subtract_noise = false;

    // verify
    double verify_tolerance = 0.05;
    long verify_steps = 50000;
    double verify_eps = 1e-3;
    std::vector<double> verify_bernoulli_p = {0.1, 0.25, 0.5};
    double verify_two_context_pa = 0.8;
    double verify_two_context_pb = 0.2;
    double verify_noise_m = 0.3;
    bool verify_early_stop = false;
    bool verify_overlap_demo = true;

    int input_size() const { return input_width * input_height * polarities; }
    SensorMapping mapping() const;
    void validate() const;
};

class Config {
public:
    Config(); // defaults
    static Config load(const std::filesystem::path &path);
    static Config from_json_text(const std::string &text);

    // dotted key, e.g. "train.passes"; the key must exist and the value
    // must parse to the same JSON type as the default.
    void set(const std::string &dotted_key, const std::string &value);

    const nlohmann::json &tree() const { return tree_; }
    std::string dump(int indent = 2) const { return tree_.dump(indent); }

    TrainConfig typed() const; // validates

private:
    explicit Config(nlohmann::json tree) : tree_(std::move(tree)) {}
    nlohmann::json tree_;
};

// Resolved-run manifest: everything needed to reproduce the command.
void write_manifest(const std::filesystem::path &out_dir,
                    const std::string &command, const Config &config,
                    const std::vector<std::pair<std::string, std::string>>
                        &extra = {});

} // namespace sel

#endif
