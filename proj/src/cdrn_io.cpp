// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "irschest/cdrn.hpp"

namespace irschest {

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace detail

namespace {

constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kMaxDimension = 1u << 16;

}  // namespace

std::vector<std::uint8_t> serialize_model(const CdrnModel& model) {
    detail::ByteWriter w;
    w.raw("CDRN", 4);
    w.u32(kModelVersion);
    const CdrnConfig& c = model.config;
    for (std::size_t v : {c.blocks, c.layers_per_block, c.filters, c.kernel, c.in_channels, model.height, model.width})
        w.u32(static_cast<std::uint32_t>(v));
    w.f64(model.input_scale);
    w.f64(model.trained_snr_db);
    for (const auto& block : model.blocks) {
        for (const auto& layer : block.layers) {
            w.f32_array(layer.weights);
            if (layer.has_bn) {
                w.f32_array(layer.bn.scale);
                w.f32_array(layer.bn.shift);
                w.f32_array(layer.bn.running_mean);
                w.f32_array(layer.bn.running_var);
            }
        }
    }
    return std::move(w.bytes());
}

CdrnModel deserialize_model(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic("CDRN");
    const std::size_t version_at = r.position();
    if (const auto v = r.u32("format version"); v != kModelVersion)
        throw FormatError("unsupported model format version " + std::to_string(v), version_at);

    const std::size_t config_at = r.position();
    CdrnConfig cfg;
    cfg.blocks = r.u32("blocks");
    cfg.layers_per_block = r.u32("layers per block");
    cfg.filters = r.u32("filters");
    cfg.kernel = r.u32("kernel");
    cfg.in_channels = r.u32("input channels");
    const std::size_t height = r.u32("height");
    const std::size_t width = r.u32("width");
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw FormatError(e.what(), config_at);
    }
    if (height == 0 || width == 0 || height > kMaxDimension || width > kMaxDimension || cfg.blocks > kMaxDimension ||
        cfg.layers_per_block > kMaxDimension || cfg.filters > kMaxDimension)
        throw FormatError("implausible model dimensions", config_at);

    SeededRng unused(0, 0);
    CdrnModel model = make_model(cfg, height, width, unused);
    model.input_scale = r.f64("input scale");
    model.trained_snr_db = r.f64("trained SNR");
    if (!(model.input_scale > 0.0) || !std::isfinite(model.input_scale))
        throw FormatError("input scale must be positive", r.position() - 16);

    for (auto& block : model.blocks) {
        for (auto& layer : block.layers) {
            r.f32_array(layer.weights, "conv weights");
            if (layer.has_bn) {
                r.f32_array(layer.bn.scale, "BN scale");
                r.f32_array(layer.bn.shift, "BN shift");
                r.f32_array(layer.bn.running_mean, "BN running mean");
                const std::size_t var_at = r.position();
                r.f32_array(layer.bn.running_var, "BN running variance");
                for (double v : layer.bn.running_var)
                    if (!(v > 0.0)) throw FormatError("BN running variance must be positive", var_at);
            }
        }
    }
    r.expect_end();
    return model;
}

void save_model(const CdrnModel& model, const std::filesystem::path& path) {
    detail::write_file(path, serialize_model(model));
}

CdrnModel load_model(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    try {
        return deserialize_model(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.message(), e.offset());
    }
}

}  // namespace irschest
