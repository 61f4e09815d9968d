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
#include <vector>

#include "irschest/channel_model.hpp"
#include "irschest/linalg.hpp"

namespace irschest {

enum class PatternKind { Dft, Binary };

/// Reflection patterns and user pilot sequences for one estimation phase.
struct PilotBook {
    CMatrix P;  ///< (N+1) x C, column c = [1, r_c^T]^T
    CMatrix U;  ///< L x K, column k = u_k
    PatternKind kind = PatternKind::Dft;
    double tx_power = 1.0;

    std::size_t subframes() const noexcept { return P.cols(); }
    std::size_t users() const noexcept { return U.cols(); }
    std::size_t pilot_length() const noexcept { return U.rows(); }
};

/// Per-user observation after pilot separation, X = H P + Z.
struct UserObservation {
    CMatrix X;  ///< M x C
    std::size_t user_index = 0;
    double sigma_z_sq = 0.0;
};

/// Received pilot blocks S_c (M x L each) of one estimation phase.
struct ReceivedFrames {
    std::vector<CMatrix> slots;
    double sigma_v_sq = 0.0;
};

/// P(n, c) = exp(j 2 pi n c / C); ProtocolError if C < N + 1.
CMatrix build_dft_patterns(std::size_t N, std::size_t C);

/// Column 0 switches every element off; column c turns on element c alone at zero phase.
CMatrix build_binary_patterns(std::size_t N);

/// First K columns of the L-point DFT matrix scaled by sqrt(power); U^H U = power L I.
CMatrix build_pilot_sequences(std::size_t K, std::size_t L, double power);

PilotBook make_dft_book(const SystemConfig& cfg);

/// Binary book uses C = N + 1 sub-frames regardless of cfg.C.
PilotBook make_binary_book(const SystemConfig& cfg);

/// S_c = sum_k H_k p_c u_k^H + V_c with V_c entries CSCG of variance sigma_v_sq.
ReceivedFrames synthesize_rx(const ChannelRealization& chan, const PilotBook& book, double sigma_v_sq,
                             SeededRng& rng);

/// x_{c,k} = S_c u_k / (power L), stacked over c. Noise variance becomes sigma_v_sq / (power L).
UserObservation separate_user(const ReceivedFrames& frames, const PilotBook& book, std::size_t k);

/// X = H P + Z drawn directly at the separated-signal level.
UserObservation direct_observation(const CMatrix& H, const CMatrix& P, double sigma_z_sq, SeededRng& rng,
                                   std::size_t user_index = 0);

}  // namespace irschest
