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

#include "irschest/dataset.hpp"

#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "irschest/config.hpp"
#include "irschest/errors.hpp"
#include "irschest/estimators.hpp"
#include "irschest/pilot_protocol.hpp"

namespace irschest {

namespace {

constexpr std::uint32_t kDatasetVersion = 1;

// Stores a sample rounded to single precision so an in-memory set matches its file image.
void store_rounded(Tensor4& t, std::size_t b, const CMatrix& x) {
    store_sample(t, b, x);
    for (double& v : t.sample(b)) v = static_cast<float>(v);
}

template <typename SnrFn>
TrainingSet generate(const SystemConfig& cfg, std::size_t count, std::uint64_t seed, SnrFn&& snr_for) {
    cfg.validate();
    if (count == 0) throw DomainError("generate_dataset: count must be >= 1");
    const PilotBook book = make_dft_book(cfg);

    TrainingSet set;
    set.config = cfg;
    set.seed = seed;
    set.inputs = Tensor4(count, cfg.M, cfg.N + 1, 2);
    set.targets = Tensor4(count, cfg.M, cfg.N + 1, 2);
    for (std::size_t i = 0; i < count; ++i) {
        const double sigma = noise_variance_for_snr(snr_for(i), cfg.tx_power);
        SeededRng rng(seed, derive_stream({stream_tag::dataset, i}));
        const ChannelRealization chan = sample_channels(cfg, rng);
        const CMatrix& H = chan.H[i % cfg.K];
        const UserObservation obs = direct_observation(H, book.P, sigma, rng, i % cfg.K);
        store_rounded(set.inputs, i, ls_estimate_dft(obs.X, book.P));
        store_rounded(set.targets, i, H);
    }
    return set;
}

}  // namespace

double noise_variance_for_snr(double snr_db, double tx_power) {
    if (std::isnan(snr_db)) throw DomainError("SNR must not be NaN");
    if (!(tx_power > 0.0)) throw DomainError("transmit power must be positive");
    if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
    return tx_power / std::pow(10.0, snr_db / 10.0);
}

TrainingSet generate_dataset(const SystemConfig& cfg, double snr_db, std::size_t count, std::uint64_t seed) {
    TrainingSet set = generate(cfg, count, seed, [snr_db](std::size_t) { return snr_db; });
    set.snr_db = set.snr_db_max = snr_db;
    return set;
}

TrainingSet generate_dataset_range(const SystemConfig& cfg, double snr_lo, double snr_hi, std::size_t count,
                                   std::uint64_t seed) {
    if (!std::isfinite(snr_lo) || !std::isfinite(snr_hi) || snr_hi < snr_lo)
        throw DomainError("generate_dataset_range: need finite snr_lo <= snr_hi");
    TrainingSet set = generate(cfg, count, seed, [&](std::size_t i) {
        SeededRng rng(seed, derive_stream({stream_tag::dataset_snr, i}));
        return snr_lo + (snr_hi - snr_lo) * rng.uniform();
    });
    set.snr_db = snr_lo;
    set.snr_db_max = snr_hi;
    return set;
}

std::vector<std::uint8_t> serialize_dataset(const TrainingSet& set) {
    if (!set.inputs.same_shape(set.targets)) throw ShapeError("serialize_dataset: inputs and targets differ in shape");
    detail::ByteWriter w;
    w.raw("CEDS", 4);
    w.u32(kDatasetVersion);
    w.u64(set.inputs.batch);
    w.u32(static_cast<std::uint32_t>(set.inputs.height));
    w.u32(static_cast<std::uint32_t>(set.inputs.width));
    w.u32(static_cast<std::uint32_t>(set.inputs.channels));
    w.f64(set.snr_db);
    w.f64(set.snr_db_max);
    w.u64(set.seed);
    w.string(system_config_to_json(set.config));
    w.f32_array(set.inputs.data);
    w.f32_array(set.targets.data);
    return std::move(w.bytes());
}

TrainingSet deserialize_dataset(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic("CEDS");
    const std::size_t version_at = r.position();
    if (const auto v = r.u32("format version"); v != kDatasetVersion)
        throw FormatError("unsupported dataset format version " + std::to_string(v), version_at);
    const std::size_t shape_at = r.position();
    const std::uint64_t count = r.u64("example count");
    const std::size_t h = r.u32("height"), w = r.u32("width"), c = r.u32("channels");
    if (count == 0 || h == 0 || w == 0 || c != 2) throw FormatError("invalid dataset shape", shape_at);
    // Two f32 tensors must fit in what is left; checked before allocating.
    const long double need = 2.0L * count * h * w * c * sizeof(float);
    TrainingSet set;
    set.snr_db = r.f64("SNR");
    set.snr_db_max = r.f64("SNR upper bound");
    set.seed = r.u64("seed");
    const std::size_t json_at = r.position();
    const std::string json = r.string("generation config");
    try {
        set.config = system_config_from_json(json);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("embedded config: ") + e.what(), json_at);
    }
    if (need > static_cast<long double>(r.remaining())) throw FormatError("truncated tensor payload", r.position());
    set.inputs = Tensor4(count, h, w, c);
    set.targets = Tensor4(count, h, w, c);
    r.f32_array(set.inputs.data, "inputs");
    r.f32_array(set.targets.data, "targets");
    r.expect_end();
    return set;
}

void save_dataset(const TrainingSet& set, const std::filesystem::path& path) {
    detail::write_file(path, serialize_dataset(set));
}

TrainingSet load_dataset(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    try {
        return deserialize_dataset(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.message(), e.offset());
    }
}

}  // namespace irschest
