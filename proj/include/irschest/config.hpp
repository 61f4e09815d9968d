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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "irschest/cdrn.hpp"
#include "irschest/channel_model.hpp"
#include "irschest/sweep.hpp"

namespace irschest {

struct SweepSettings {
    std::vector<double> snr_db{0, 5, 10, 15, 20};
    std::vector<double> n_elements{8, 16, 32};
    std::vector<double> m_antennas{2, 4, 8};
    std::vector<double> c_pilots{9, 18, 36};
    std::vector<EstimatorKind> estimators{EstimatorKind::LS, EstimatorKind::ELMMSE, EstimatorKind::BLMMSE};
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::size_t elmmse_draws = 100000;
    std::optional<double> fixed_snr_db;
    std::vector<std::pair<double, std::string>> cdrn_models;  ///< (swept value, model path)
};

/// Dataset size and SNR used when the CLI trains from a config alone.
struct DataSettings {
    std::size_t count = 10000;
    double snr_db = 10.0;
    std::uint64_t seed = 1;
};

struct AppConfig {
    SystemConfig system;
    SweepSettings sweep;
    CdrnConfig net;
    TrainConfig train;
    DataSettings data;
};

/// Parses a config document. Every section is optional; unknown keys raise ConfigError naming the key.
AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::filesystem::path& path);

std::string system_config_to_json(const SystemConfig& cfg);
SystemConfig system_config_from_json(const std::string& json_text);

SweepSpec make_sweep_spec(const AppConfig& cfg, SweepVariable variable);

}  // namespace irschest
