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
#include <span>
#include <vector>

#include "irschest/linalg.hpp"
#include "irschest/rng.hpp"

namespace irschest {

/// System dimensions, powers and link geometry. Defaults are the desk-scale system
/// (M=4, N=8, K=2, C=9, L=2) on the reference geometry: 100 m user-BS, 90 m IRS-BS,
/// 16 m user-IRS, exponents 3.6 / 2.3 / 2.0, -15 dB at 10 m, Rician 0 / 10 / 0.
struct SystemConfig {
    std::size_t M = 4;  ///< BS antennas
    std::size_t N = 8;  ///< IRS elements
    std::size_t K = 2;  ///< users
    std::size_t C = 9;  ///< sub-frames (reflection patterns)
    std::size_t L = 2;  ///< pilot symbols per sub-frame

    double tx_power = 1.0;
    double sigma_z_sq = 0.1;  ///< noise variance after user separation

    double dist_ub = 100.0;
    double dist_ib = 90.0;
    double dist_ui = 16.0;
    double exp_ub = 3.6;
    double exp_ib = 2.3;
    double exp_ui = 2.0;
    double ref_dist = 10.0;
    double ref_loss = 0.031622776601683794;  // 10^(-1.5)

    double rice_ub = 0.0;
    double rice_ib = 10.0;
    double rice_ui = 0.0;

    /// Optional per-user distances; empty means every user uses dist_ub / dist_ui.
    std::vector<double> user_dist_ub;
    std::vector<double> user_dist_ui;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;

    double user_distance_ub(std::size_t k) const;
    double user_distance_ui(std::size_t k) const;

    bool operator==(const SystemConfig&) const = default;
};

/// One draw of every link in the system.
struct ChannelRealization {
    CMatrix G;               ///< M x N, IRS -> BS
    std::vector<CMatrix> f;  ///< K of N x 1, user -> IRS
    std::vector<CMatrix> d;  ///< K of M x 1, user -> BS
    std::vector<CMatrix> H;  ///< K of M x (N+1), [d_k, G diag(f_k)]
};

/// ref_loss * (distance / ref_dist)^(-exponent).
double path_loss(double distance, double exponent, double ref_loss, double ref_dist);

/// Rank-one a_r(theta_r) a_t(theta_t)^H of half-wavelength ULA steering vectors, both angles
/// uniform on [0, 2 pi). Every entry has unit modulus.
CMatrix los_component(std::size_t rows, std::size_t cols, SeededRng& rng);

/// sqrt(beta/(beta+1)) los + sqrt(1/(beta+1)) Z with Z unit-variance CSCG.
CMatrix sample_rician(std::size_t rows, std::size_t cols, double rice_factor, const CMatrix& los,
                      SeededRng& rng);

/// G diag(f).
CMatrix cascade(const CMatrix& G, const CMatrix& f);

/// [d, B] as one M x (N+1) matrix.
CMatrix compose_channel(const CMatrix& d, const CMatrix& B);

ChannelRealization sample_channels(const SystemConfig& cfg, SeededRng& rng);

/// (1/count) sum H^H H.
CMatrix empirical_correlation(std::span<const CMatrix> samples);

/// Streaming form of empirical_correlation.
class CorrelationAccumulator {
public:
    void add(const CMatrix& H);
    std::size_t count() const noexcept { return count_; }
    CMatrix result() const;

private:
    CMatrix sum_;
    std::size_t count_ = 0;
};

/// E[H_k^H H_k] in closed form. Only defined when the user-BS and user-IRS links are
/// zero-mean (rice_ub = rice_ui = 0); the result is then diagonal. ConfigError otherwise.
CMatrix analytic_correlation(const SystemConfig& cfg, std::size_t k);

}  // namespace irschest
