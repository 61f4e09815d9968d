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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irschest/linalg.hpp"
#include "irschest/pilot_protocol.hpp"

namespace irschest {

/// Prior statistics for linear MMSE estimation of one user's M x (N+1) channel.
struct LmmseContext {
    CMatrix R_H;  ///< E[H^H H], (N+1) x (N+1)
    std::size_t M = 0;
    double sigma_z_sq = 0.0;
    std::size_t C = 0;

    /// ConfigError unless R_H is square and Hermitian to 1e-10 (relative) and sigma_z_sq > 0.
    void validate() const;
};

struct EstimateReport {
    CMatrix estimate;
    std::string estimator_name;
    std::optional<std::pair<double, double>> per_block_nmse;  ///< (direct column, cascaded columns)
};

/// X P^H (P P^H)^{-1}. NumericalError if P is rank deficient.
CMatrix ls_estimate(const CMatrix& X, const CMatrix& P);

/// X P^H / C; valid only when P P^H = C I (DFT books).
CMatrix ls_estimate_dft(const CMatrix& X, const CMatrix& P);

/// Picks the fast form for DFT books.
CMatrix ls_estimate(const CMatrix& X, const PilotBook& book);

/// X (P^H R P + M sigma^2 I_C)^{-1} P^H R. Valid for any full-row-rank P.
CMatrix lmmse_estimate(const CMatrix& X, const CMatrix& P, const LmmseContext& ctx);

/// H_LS (R + (M sigma^2 / C) I)^{-1} R; the (N+1) x (N+1) form for DFT books.
CMatrix lmmse_estimate_dft(const CMatrix& X, const CMatrix& P, const LmmseContext& ctx);

/// Uses the (N+1) x (N+1) solve for DFT books and the C x C solve otherwise.
CMatrix lmmse_estimate(const CMatrix& X, const PilotBook& book, const LmmseContext& ctx);

/// LMMSE under a binary pattern book. Always the C x C form.
CMatrix blmmse_estimate(const CMatrix& X_bin, const CMatrix& P_bin, const LmmseContext& ctx);

/// H_ls (I - W).
CMatrix linear_residual_estimate(const CMatrix& H_ls, const CMatrix& W);

/// Residual weights W = (I + (C / (M sigma^2)) R)^{-1}, for which
/// linear_residual_estimate(H_LS, W) coincides with the LMMSE estimate on a DFT book.
CMatrix lmmse_residual_weights(const CMatrix& R_H, std::size_t M, double sigma_z_sq, std::size_t C);

/// Column 0 (direct link).
std::vector<std::size_t> direct_columns();

/// Columns 1..N (cascaded link).
std::vector<std::size_t> cascaded_columns(std::size_t N);

/// sum ||est - truth||_F^2 / sum ||truth||_F^2 over the selected columns (all when empty).
/// DomainError on zero denominator.
double nmse(std::span<const CMatrix> estimates, std::span<const CMatrix> truths,
            std::span<const std::size_t> column_mask = {});

/// Squared error and truth energy restricted to the given columns.
std::pair<double, double> masked_error(const CMatrix& estimate, const CMatrix& truth,
                                       std::span<const std::size_t> column_mask = {});

EstimateReport make_report(std::string name, CMatrix estimate, const CMatrix& truth);

}  // namespace irschest
