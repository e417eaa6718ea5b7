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

#include "checkpoint.hpp"

#include "error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace sel {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'S', 'E', 'L', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T> void put_le(std::ostream &out, T value) {
    std::array<unsigned char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>(
            (static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char *>(buf.data()), sizeof(T));
}

template <typename T> T get_le(std::istream &in, const std::string &what) {
    std::array<unsigned char, sizeof(T)> buf{};
    if (!in.read(reinterpret_cast<char *>(buf.data()), sizeof(T)))
        fail(ErrorCode::parse, "checkpoint truncated reading " + what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

void write_tensor(std::ostream &out, const DelayedWeightTensor &w) {
    for (double v : w.data())
        put_le(out, std::bit_cast<std::uint64_t>(v));
}

void read_tensor(std::istream &in, DelayedWeightTensor &w,
                 const std::string &name) {
    for (double &v : w.data())
        v = std::bit_cast<double>(
            get_le<std::uint64_t>(in, "tensor " + name));
}

} // namespace

void save_checkpoint(const Model &model, const std::filesystem::path &path) {
    json header{
        {"format_version", kVersion},
        {"arch",
         {{"input_width", model.arch.input_width},
          {"input_height", model.arch.input_height},
          {"polarities", model.arch.polarities},
          {"hidden", model.arch.hidden},
          {"delays", model.arch.delays},
          {"tau_us", model.arch.tau_us}}},
        {"prediction_dt", model.prediction_dt},
        {"dropout_rate", model.dropout_rate},
        {"noise_rate", model.noise_rate},
        {"pass_index", model.pass_index},
        {"next_layer", model.next_layer},
        {"trained_steps", model.trained_steps},
        {"seed", model.seed},
        {"epsilon",
         {{"eps0_layers", model.eps0_layers},
          {"eps0_heads", model.eps0_heads},
          {"halve_per_pass", model.halve_per_pass},
          {"layers_next_pass",
           epsilon_schedule(model.pass_index, model.eps0_layers,
                            model.halve_per_pass)},
          {"heads_next_pass",
           epsilon_schedule(model.pass_index, model.eps0_heads,
                            model.halve_per_pass)}}},
        // streams are derived from (seed, pass, layer), so seed plus the
        // recorded position is the complete generator state at this
        // boundary
        {"rng", {{"scheme", "derived-per-pass-and-layer"},
                 {"master_seed", model.seed}}},
        {"index_order", "post,pre,delay"},
    };
    if (!model.config_json.empty()) {
        try {
            header["config"] = json::parse(model.config_json);
        } catch (const json::parse_error &) {
            header["config"] = model.config_json;
        }
    }
    json tensors = json::array();
    for (const std::string &name : model.tensor_names()) {
        const DelayedWeightTensor *w = model.find_tensor(name);
        tensors.push_back({{"name", name},
                           {"post", w->post_size()},
                           {"pre", w->pre_size()},
                           {"delays", w->delays()}});
    }
    header["tensors"] = std::move(tensors);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put_le(out, kVersion);
    const std::string header_text = header.dump();
    put_le(out, static_cast<std::uint64_t>(header_text.size()));
    out.write(header_text.data(),
              static_cast<std::streamsize>(header_text.size()));
    for (const std::string &name : model.tensor_names())
        write_tensor(out, *model.find_tensor(name));
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

Model load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());

    char magic[8];
    if (!in.read(magic, sizeof(magic)) ||
        std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        fail(ErrorCode::parse, path.string() + ": not a checkpoint file");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kVersion)
        fail(ErrorCode::parse, path.string() + ": unsupported version " +
                                   std::to_string(version));
    const auto header_len = get_le<std::uint64_t>(in, "header length");
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(),
                 static_cast<std::streamsize>(header_len)))
        fail(ErrorCode::parse, path.string() + ": truncated header");

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::parse, path.string() + ": bad header: " + e.what());
    }

    Model model;
    try {
        const json &arch = header.at("arch");
        model.arch.input_width = arch.at("input_width").get<int>();
        model.arch.input_height = arch.at("input_height").get<int>();
        model.arch.polarities = arch.at("polarities").get<int>();
        model.arch.hidden = arch.at("hidden").get<std::vector<int>>();
        model.arch.delays = arch.at("delays").get<int>();
        model.arch.tau_us = arch.at("tau_us").get<std::int64_t>();
        model.prediction_dt = header.at("prediction_dt").get<int>();
        model.dropout_rate = header.at("dropout_rate").get<double>();
        model.noise_rate = header.at("noise_rate").get<double>();
        model.pass_index = header.at("pass_index").get<int>();
        model.next_layer = header.at("next_layer").get<int>();
        model.trained_steps = header.at("trained_steps").get<std::int64_t>();
        model.seed = header.at("seed").get<std::uint64_t>();
        if (header.contains("epsilon")) {
            const json &eps = header.at("epsilon");
            model.eps0_layers = eps.at("eps0_layers").get<double>();
            model.eps0_heads = eps.at("eps0_heads").get<double>();
            model.halve_per_pass = eps.at("halve_per_pass").get<bool>();
        }
        if (header.contains("config"))
            model.config_json = header.at("config").dump(0);
    } catch (const json::exception &e) {
        fail(ErrorCode::parse,
             path.string() + ": bad header field: " + e.what());
    }

    // Rebuild tensors at their declared shapes, then require agreement
    // with the architecture-derived directory.
    for (int l = 1; l <= model.arch.hidden_count(); ++l)
        model.layers.emplace_back(model.arch.layer_size(l),
                                  model.arch.layer_size(l - 1),
                                  model.arch.delays);
    auto rebuild_head = [&](const std::string &name, int size) {
        HeadGroup head;
        head.name = name;
        head.size = size;
        for (int s = 0; s <= model.arch.hidden_count(); ++s)
            head.per_source.emplace_back(size, model.arch.layer_size(s),
                                         model.arch.delays);
        return head;
    };
    model.prediction = rebuild_head("prediction", model.arch.input_size());
    model.classification = rebuild_head("classification", kClassCount);

    const json &tensors = header.at("tensors");
    const auto names = model.tensor_names();
    if (tensors.size() != names.size())
        fail(ErrorCode::parse, path.string() + ": tensor directory lists " +
                                   std::to_string(tensors.size()) +
                                   " tensors, expected " +
                                   std::to_string(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        const json &entry = tensors[i];
        DelayedWeightTensor *w = model.find_tensor(names[i]);
        if (entry.at("name").get<std::string>() != names[i] ||
            entry.at("post").get<int>() != w->post_size() ||
            entry.at("pre").get<int>() != w->pre_size() ||
            entry.at("delays").get<int>() != w->delays())
            fail(ErrorCode::parse, path.string() +
                                       ": tensor directory mismatch at '" +
                                       names[i] + "'");
        read_tensor(in, *w, names[i]);
    }
    return model;
}

} // namespace sel
