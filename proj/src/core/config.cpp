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

#include "config.hpp"

#include "error.hpp"

#include <fstream>

namespace sel {

using nlohmann::json;

namespace {

json default_tree() {
    return json{
        {"arch",
         {{"input_width", 23},
          {"input_height", 23},
          {"polarities", 2},
          {"hidden", json::array({1000, 1000, 1000})},
          {"delays", 5},
          {"tau_us", 30000}}},
        {"learn",
         {{"eps0_layers", 1e-5},
          {"eps0_heads", 2.5e-6},
          {"halve_per_pass", true},
          {"noise_rate", 0.0},
          {"prediction_dt", 15},
          {"classification_strength", 1.0}}},
        {"train",
         {{"passes", 3},
          {"dropout", 0.5},
          {"seed", 1},
          {"checkpoint_every", 1},
          {"probe_recordings", 20}}},
        {"data",
         {{"type", "files"},
          {"dir", ""},
          {"gap", 15},
          {"train_per_class", 900},
          {"test_per_class", 100},
          {"crop_x", 52},
          {"crop_y", 52}}},
        {"synth",
         {{"classes", json::array({0, 1})},
          {"count", 50},
          {"length", 60},
          {"noise_rate", 0.01},
          {"format", "csv"}}},
        {"eval",
         {{"max_recordings", 0}, {"subtract_noise", false}}},
        {"verify",
         {{"tolerance", 0.05},
          {"steps", 50000},
          {"eps", 1e-3},
          {"bernoulli_p", json::array({0.1, 0.25, 0.5})},
          {"two_context_pa", 0.8},
          {"two_context_pb", 0.2},
          {"noise_m", 0.3},
          {"early_stop", false},
          {"overlap_demo", true}}}};
}

bool same_kind(const json &a, const json &b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

void merge_strict(json &base, const json &patch, const std::string &prefix) {
    if (!patch.is_object())
        fail(ErrorCode::config,
             "config node '" + (prefix.empty() ? "<root>" : prefix) +
                 "' must be an object");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string path =
            prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key()))
            fail(ErrorCode::config, "unknown config key '" + path + "'");
        json &slot = base[it.key()];
        if (slot.is_object()) {
            merge_strict(slot, it.value(), path);
        } else {
            if (!same_kind(slot, it.value()))
                fail(ErrorCode::config,
                     "config key '" + path + "' expects " +
                         std::string(slot.type_name()) + ", got " +
                         std::string(it.value().type_name()));
            slot = it.value();
        }
    }
}

} // namespace

Config::Config() : tree_(default_tree()) {}

Config Config::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::parse, path.string() + ": " + e.what());
    }
    json tree = default_tree();
    merge_strict(tree, parsed, "");
    return Config(std::move(tree));
}

Config Config::from_json_text(const std::string &text) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::parse, std::string("config text: ") + e.what());
    }
    json tree = default_tree();
    merge_strict(tree, parsed, "");
    return Config(std::move(tree));
}

void Config::set(const std::string &dotted_key, const std::string &value) {
    json *node = &tree_;
    std::size_t start = 0;
    std::string walked;
    while (true) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        walked = walked.empty() ? part : walked + "." + part;
        if (!node->is_object() || !node->contains(part))
            fail(ErrorCode::config, "unknown config key '" + walked + "'");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object())
        fail(ErrorCode::config,
             "config key '" + dotted_key + "' is a section, not a value");

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error &) {
        parsed = value; // treat as a plain string
    }
    if (!same_kind(*node, parsed))
        fail(ErrorCode::config,
             "config key '" + dotted_key + "' expects " +
                 std::string(node->type_name()) + ", got '" + value + "'");
    *node = parsed;
}

TrainConfig Config::typed() const {
    TrainConfig c;
    const json &t = tree_;
    try {
        const json &arch = t.at("arch");
        c.input_width = arch.at("input_width").get<int>();
        c.input_height = arch.at("input_height").get<int>();
        c.polarities = arch.at("polarities").get<int>();
        c.hidden = arch.at("hidden").get<std::vector<int>>();
        c.delays = arch.at("delays").get<int>();
        c.tau_us = arch.at("tau_us").get<std::int64_t>();

        const json &learn = t.at("learn");
        c.learn.eps0_layers = learn.at("eps0_layers").get<double>();
        c.learn.eps0_heads = learn.at("eps0_heads").get<double>();
        c.learn.halve_per_pass = learn.at("halve_per_pass").get<bool>();
        c.learn.noise_rate = learn.at("noise_rate").get<double>();
        c.learn.prediction_dt = learn.at("prediction_dt").get<int>();
        c.learn.classification_strength =
            learn.at("classification_strength").get<double>();

        const json &train = t.at("train");
        c.passes = train.at("passes").get<int>();
        c.dropout = train.at("dropout").get<double>();
        c.seed = train.at("seed").get<std::uint64_t>();
        c.checkpoint_every = train.at("checkpoint_every").get<int>();
        c.probe_recordings = train.at("probe_recordings").get<int>();

        const json &data = t.at("data");
        c.data_type = data.at("type").get<std::string>();
        c.data_dir = data.at("dir").get<std::string>();
        c.gap = data.at("gap").get<int>();
        c.train_per_class = data.at("train_per_class").get<int>();
        c.test_per_class = data.at("test_per_class").get<int>();
        c.crop_x = data.at("crop_x").get<int>();
        c.crop_y = data.at("crop_y").get<int>();

        const json &synth = t.at("synth");
        c.synth_classes = synth.at("classes").get<std::vector<int>>();
        c.synth_count = synth.at("count").get<int>();
        c.synth_length = synth.at("length").get<int>();
        c.synth_noise = synth.at("noise_rate").get<double>();
        c.synth_format = synth.at("format").get<std::string>();

        const json &ev = t.at("eval");
        c.eval_max_recordings = ev.at("max_recordings").get<int>();
        c.eval_subtract_noise = ev.at("subtract_noise").get<bool>();

        const json &verify = t.at("verify");
        c.verify_tolerance = verify.at("tolerance").get<double>();
        c.verify_steps = verify.at("steps").get<long>();
        c.verify_eps = verify.at("eps").get<double>();
        c.verify_bernoulli_p =
            verify.at("bernoulli_p").get<std::vector<double>>();
        c.verify_two_context_pa = verify.at("two_context_pa").get<double>();
        c.verify_two_context_pb = verify.at("two_context_pb").get<double>();
        c.verify_noise_m = verify.at("noise_m").get<double>();
        c.verify_early_stop = verify.at("early_stop").get<bool>();
        c.verify_overlap_demo = verify.at("overlap_demo").get<bool>();
    } catch (const json::exception &e) {
        fail(ErrorCode::config, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

SensorMapping TrainConfig::mapping() const {
    SensorMapping m;
    m.crop_x = crop_x;
    m.crop_y = crop_y;
    m.crop_width = input_width;
    m.crop_height = input_height;
    m.polarity_channels = polarities;
    return m;
}

void TrainConfig::validate() const {
    if (input_width < 1 || input_height < 1)
        fail(ErrorCode::config, "input grid must be at least 1x1");
    if (polarities != 2)
        fail(ErrorCode::config, "expected two polarity channels");
    if (hidden.empty())
        fail(ErrorCode::config, "at least one hidden layer required");
    for (int h : hidden)
        if (h < 1) fail(ErrorCode::config, "hidden layer sizes must be >= 1");
    if (delays < 1) fail(ErrorCode::config, "delay count must be >= 1");
    if (tau_us < 1) fail(ErrorCode::config, "tau_us must be positive");
    learn.validate();
    if (passes < 1) fail(ErrorCode::config, "passes must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0))
        fail(ErrorCode::config, "dropout must lie in [0,1)");
    if (checkpoint_every < 0)
        fail(ErrorCode::config, "checkpoint_every must be >= 0");
    if (probe_recordings < 0)
        fail(ErrorCode::config, "probe_recordings must be >= 0");
    if (data_type != "files" && data_type != "synth")
        fail(ErrorCode::config, "data.type must be 'files' or 'synth'");
    if (gap < 0) fail(ErrorCode::config, "gap must be >= 0");
    if (train_per_class < 1 || test_per_class < 1)
        fail(ErrorCode::config, "split sizes must be >= 1");
    mapping().validate();
    if (synth_classes.empty())
        fail(ErrorCode::config, "synth.classes must not be empty");
    for (int cl : synth_classes)
        if (cl < 0 || cl >= kSynthClassCount)
            fail(ErrorCode::config,
                 "unknown synthetic class " + std::to_string(cl));
    if (synth_count < 0) fail(ErrorCode::config, "synth.count must be >= 0");
    if (synth_length < 1)
        fail(ErrorCode::config, "synth.length must be >= 1");
    if (synth_noise < 0.0)
        fail(ErrorCode::config, "synth.noise_rate must be >= 0");
    parse_event_format_name(synth_format);
    if (eval_max_recordings < 0)
        fail(ErrorCode::config, "eval.max_recordings must be >= 0");
    if (!(verify_tolerance > 0.0))
        fail(ErrorCode::config, "verify.tolerance must be positive");
    if (verify_steps < 1) fail(ErrorCode::config, "verify.steps must be >= 1");
    if (!(verify_eps > 0.0))
        fail(ErrorCode::config, "verify.eps must be positive");
    for (double p : verify_bernoulli_p)
        if (!(p > 0.0 && p < 1.0))
            fail(ErrorCode::config, "verify.bernoulli_p entries must lie in (0,1)");
    for (double p : {verify_two_context_pa, verify_two_context_pb})
        if (!(p > 0.0 && p < 1.0))
            fail(ErrorCode::config, "two-context rates must lie in (0,1)");
    if (verify_noise_m < 0.0)
        fail(ErrorCode::config, "verify.noise_m must be >= 0");
}

void write_manifest(const std::filesystem::path &out_dir,
                    const std::string &command, const Config &config,
                    const std::vector<std::pair<std::string, std::string>>
                        &extra) {
    json manifest{{"tool", "sel"},
                  {"manifest_version", 1},
                  {"command", command},
                  {"config", config.tree()}};
    for (const auto &[key, value] : extra) manifest[key] = value;
    const auto path = out_dir / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << manifest.dump(2) << '\n';
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

} // namespace sel
