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

#include "model.hpp"

#include "error.hpp"

namespace sel {

int Architecture::layer_size(int layer) const {
    if (layer == 0) return input_size();
    if (layer >= 1 && layer <= hidden_count())
        return hidden[static_cast<std::size_t>(layer - 1)];
    fail(ErrorCode::bounds, "layer index " + std::to_string(layer) +
                                " out of range");
}

std::vector<LayerSpec> Architecture::layer_specs() const {
    std::vector<LayerSpec> specs;
    specs.push_back({"input", input_size(), LayerRole::input});
    for (int l = 1; l <= hidden_count(); ++l)
        specs.push_back({"hidden" + std::to_string(l), layer_size(l),
                         LayerRole::hidden});
    return specs;
}

namespace {

HeadGroup make_head(const std::string &name, int size,
                    const Architecture &arch) {
    HeadGroup head;
    head.name = name;
    head.size = size;
    for (int l = 0; l <= arch.hidden_count(); ++l)
        head.per_source.emplace_back(size, arch.layer_size(l), arch.delays);
    return head;
}

std::string source_name(int source) {
    return source == 0 ? "input" : "hidden" + std::to_string(source);
}

} // namespace

Model Model::init(const TrainConfig &cfg, const Config &resolved) {
    Model m;
    m.arch.input_width = cfg.input_width;
    m.arch.input_height = cfg.input_height;
    m.arch.polarities = cfg.polarities;
    m.arch.hidden = cfg.hidden;
    m.arch.delays = cfg.delays;
    m.arch.tau_us = cfg.tau_us;
    m.prediction_dt = cfg.learn.prediction_dt;
    m.dropout_rate = cfg.dropout;
    m.noise_rate = cfg.learn.noise_rate;
    m.eps0_layers = cfg.learn.eps0_layers;
    m.eps0_heads = cfg.learn.eps0_heads;
    m.halve_per_pass = cfg.learn.halve_per_pass;
    m.seed = cfg.seed;
    m.config_json = resolved.dump(0);

    // Inter-layer weights start as small positive values in [0, eps0];
    // head weights start at zero.
    for (int l = 1; l <= m.arch.hidden_count(); ++l) {
        DelayedWeightTensor w(m.arch.layer_size(l), m.arch.layer_size(l - 1),
                              m.arch.delays);
        RngStream rng(cfg.seed, "init/layer" + std::to_string(l));
        w.fill_uniform(rng, 0.0, cfg.learn.eps0_layers);
        m.layers.push_back(std::move(w));
    }
    m.prediction = make_head("prediction", m.arch.input_size(), m.arch);
    m.classification = make_head("classification", kClassCount, m.arch);
    return m;
}

std::vector<std::string> Model::tensor_names() const {
    std::vector<std::string> names;
    for (int l = 1; l <= arch.hidden_count(); ++l)
        names.push_back("layer" + std::to_string(l));
    for (const HeadGroup *head : {&prediction, &classification})
        for (int s = 0; s <= arch.hidden_count(); ++s)
            names.push_back(head->name + ":" + source_name(s));
    return names;
}

const DelayedWeightTensor *Model::find_tensor(const std::string &name) const {
    return const_cast<Model *>(this)->find_tensor(name);
}

DelayedWeightTensor *Model::find_tensor(const std::string &name) {
    for (int l = 1; l <= arch.hidden_count(); ++l)
        if (name == "layer" + std::to_string(l))
            return &layers[static_cast<std::size_t>(l - 1)];
    for (HeadGroup *head : {&prediction, &classification})
        for (int s = 0; s <= arch.hidden_count(); ++s)
            if (name == head->name + ":" + source_name(s))
                return &head->per_source[static_cast<std::size_t>(s)];
    return nullptr;
}

Runtime::Runtime(const Model &model) : model_(&model) {
    const int capacity = model.arch.delays + model.prediction_dt;
    for (int l = 0; l <= model.arch.hidden_count(); ++l) {
        windows_.emplace_back(capacity);
    }
    reset();
}

void Runtime::reset(std::int64_t t0) {
    for (int l = 0; l <= model_->arch.hidden_count(); ++l)
        windows_[static_cast<std::size_t>(l)].fill_zero(
            static_cast<std::size_t>(model_->arch.layer_size(l)), t0);
    next_t_ = t0;
    real_steps_ = 0;
}

void Runtime::step(std::span<const double> input_values,
                   const std::vector<std::optional<DropoutMask>> *masks,
                   double hidden_scale) {
    const Architecture &arch = model_->arch;
    if (static_cast<int>(input_values.size()) != arch.input_size())
        fail(ErrorCode::bounds, "input frame size " +
                                    std::to_string(input_values.size()) +
                                    " does not match input layer " +
                                    std::to_string(arch.input_size()));
    if (masks && static_cast<int>(masks->size()) != arch.hidden_count())
        fail(ErrorCode::bounds, "need one mask slot per hidden layer");

    const std::int64_t t = next_t_++;
    TimestepFrame input(t, static_cast<std::size_t>(arch.input_size()));
    for (std::size_t i = 0; i < input_values.size(); ++i) {
        if (input_values[i] < 0.0)
            fail(ErrorCode::numeric, "input spike strength must be >= 0");
        input.values[i] = input_values[i];
    }
    windows_[0].push(std::move(input));

    for (int l = 1; l <= arch.hidden_count(); ++l) {
        const auto drive = compute_drive(
            model_->layers[static_cast<std::size_t>(l - 1)],
            windows_[static_cast<std::size_t>(l - 1)]);
        TimestepFrame frame(t, drive.size());
        const std::optional<DropoutMask> *mask =
            masks ? &(*masks)[static_cast<std::size_t>(l - 1)] : nullptr;
        for (std::size_t j = 0; j < drive.size(); ++j) {
            double v = relu(drive[j]) * hidden_scale;
            if (mask && mask->has_value() && !(*mask)->retained[j]) v = 0.0;
            frame.values[j] = v;
        }
        windows_[static_cast<std::size_t>(l)].push(std::move(frame));
    }
    ++real_steps_;
}

const HistoryWindow &Runtime::window(int layer) const {
    if (layer < 0 || layer > model_->arch.hidden_count())
        fail(ErrorCode::bounds, "layer index out of range");
    return windows_[static_cast<std::size_t>(layer)];
}

std::vector<HeadSource> Runtime::head_sources(const HeadGroup &head) const {
    std::vector<HeadSource> sources;
    for (std::size_t s = 0; s < head.per_source.size(); ++s)
        sources.push_back({&head.per_source[s], &windows_[s]});
    return sources;
}

std::vector<MutableHeadSource>
Runtime::mutable_head_sources(HeadGroup &head) const {
    std::vector<MutableHeadSource> sources;
    for (std::size_t s = 0; s < head.per_source.size(); ++s)
        sources.push_back({&head.per_source[s], &windows_[s]});
    return sources;
}

} // namespace sel
