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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "irschest/channel_model.hpp"
#include "irschest/tensor.hpp"

namespace irschest {

/// Unscaled LS estimates paired with ground-truth channels in two-channel real form, one
/// sample per batch row, plus everything needed to regenerate them.
struct TrainingSet {
    Tensor4 inputs;
    Tensor4 targets;
    SystemConfig config;
    double snr_db = 0.0;
    double snr_db_max = 0.0;  ///< equals snr_db unless drawn from a range
    std::uint64_t seed = 0;

    std::size_t count() const noexcept { return inputs.batch; }
};

/// tx_power / 10^(snr_db / 10); +inf maps to zero noise.
double noise_variance_for_snr(double snr_db, double tx_power);

/// Example i uses realization stream (seed, dataset, i) and user i mod K. Values are rounded
/// to single precision so that the stored file reproduces the set exactly.
TrainingSet generate_dataset(const SystemConfig& cfg, double snr_db, std::size_t count, std::uint64_t seed);

/// Same, with the SNR of each example drawn uniformly from [snr_lo, snr_hi].
TrainingSet generate_dataset_range(const SystemConfig& cfg, double snr_lo, double snr_hi, std::size_t count,
                                   std::uint64_t seed);

void save_dataset(const TrainingSet& set, const std::filesystem::path& path);
TrainingSet load_dataset(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_dataset(const TrainingSet& set);
TrainingSet deserialize_dataset(std::span<const std::uint8_t> bytes);

}  // namespace irschest
