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
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "irschest/cdrn.hpp"
#include "irschest/channel_model.hpp"

namespace irschest {

enum class SweepVariable { SnrDb, NElements, MAntennas, CPilots };

enum class EstimatorKind { LS, ELMMSE, BLMMSE, CDRN, MMSE_GAUSSIAN };

std::string to_string(SweepVariable v);
std::string to_string(EstimatorKind e);
SweepVariable parse_sweep_variable(const std::string& s);  ///< accepts snr|n|m|c and the long names
EstimatorKind parse_estimator(const std::string& s);

struct SweepSpec {
    SweepVariable variable = SweepVariable::SnrDb;
    std::vector<double> values;
    std::vector<EstimatorKind> estimators{EstimatorKind::LS, EstimatorKind::ELMMSE, EstimatorKind::BLMMSE};
    std::size_t trials = 10000;
    SystemConfig base;
    std::uint64_t seed = 1;
    /// Channel draws per point for the empirical correlation used by ELMMSE / BLMMSE.
    std::size_t elmmse_draws = 100000;
    /// SNR applied at every point of a non-SNR sweep; when absent base.sigma_z_sq is used.
    std::optional<double> fixed_snr_db;

    void validate() const;
};

struct ResultRow {
    std::string swept_var;
    double value = 0.0;
    std::string estimator;
    double nmse_linear = 0.0;
    double nmse_db = 0.0;
    double nmse_direct_db = 0.0;
    double nmse_cascaded_db = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    double nmse_stderr = 0.0;  ///< delta-method standard error of nmse_linear
    double nmse_direct = 0.0;
    double nmse_cascaded = 0.0;
};

/// System configuration evaluated at one swept value.
SystemConfig point_config(const SweepSpec& spec, double value);

/// Keyed by swept value.
using ModelMap = std::map<double, CdrnModel>;

/// Thread count used by run_sweep: IRS_CHEST_THREADS when set, otherwise the hardware concurrency.
std::size_t evaluation_threads();

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const ModelMap& models = {});

void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace irschest
