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

#include "irschest/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "irschest/errors.hpp"

namespace irschest {

void LmmseContext::validate() const {
    if (R_H.empty() || R_H.rows() != R_H.cols()) throw ConfigError("LmmseContext: R_H must be square");
    double scale = 0.0;
    for (const cplx& x : R_H.data()) scale = std::max(scale, std::abs(x));
    if (hermitian_defect(R_H) > 1e-10 * std::max(scale, 1e-300))
        throw ConfigError("LmmseContext: R_H is not Hermitian");
    if (!(sigma_z_sq > 0.0)) throw ConfigError("LmmseContext: sigma_z_sq must be > 0");
    if (M == 0 || C == 0) throw ConfigError("LmmseContext: M and C must be positive");
}

CMatrix ls_estimate(const CMatrix& X, const CMatrix& P) {
    if (X.cols() != P.cols()) throw ShapeError("ls_estimate: X and P column counts differ");
    // X P^H (PP^H)^{-1} = ((PP^H)^{-1} P X^H)^H since PP^H is Hermitian.
    const CMatrix gram = matmul_nh(P, P);
    return hermitian(solve_hermitian(gram, matmul_nh(P, X)));
}

CMatrix ls_estimate_dft(const CMatrix& X, const CMatrix& P) {
    if (X.cols() != P.cols()) throw ShapeError("ls_estimate_dft: X and P column counts differ");
    CMatrix h = matmul_nh(X, P);
    h *= 1.0 / static_cast<double>(P.cols());
    return h;
}

CMatrix ls_estimate(const CMatrix& X, const PilotBook& book) {
    return book.kind == PatternKind::Dft ? ls_estimate_dft(X, book.P) : ls_estimate(X, book.P);
}

CMatrix lmmse_estimate(const CMatrix& X, const CMatrix& P, const LmmseContext& ctx) {
    ctx.validate();
    if (X.cols() != P.cols() || ctx.R_H.rows() != P.rows())
        throw ShapeError("lmmse_estimate: X, P and R_H do not conform");
    CMatrix a = matmul_hn(P, matmul(ctx.R_H, P));  // P^H R P, C x C
    const double reg = static_cast<double>(ctx.M) * ctx.sigma_z_sq;
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += reg;
    // X A^{-1} = (A^{-1} X^H)^H
    const CMatrix xa = hermitian(solve_hermitian(a, hermitian(X)));
    return matmul(xa, matmul_hn(P, ctx.R_H));
}

CMatrix lmmse_estimate_dft(const CMatrix& X, const CMatrix& P, const LmmseContext& ctx) {
    ctx.validate();
    if (ctx.R_H.rows() != P.rows()) throw ShapeError("lmmse_estimate_dft: R_H and P do not conform");
    const CMatrix h_ls = ls_estimate_dft(X, P);
    CMatrix a = ctx.R_H;
    const double reg = static_cast<double>(ctx.M) * ctx.sigma_z_sq / static_cast<double>(P.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += reg;
    const CMatrix ha = hermitian(solve_hermitian(a, hermitian(h_ls)));
    return matmul(ha, ctx.R_H);
}

CMatrix lmmse_estimate(const CMatrix& X, const PilotBook& book, const LmmseContext& ctx) {
    return book.kind == PatternKind::Dft ? lmmse_estimate_dft(X, book.P, ctx) : lmmse_estimate(X, book.P, ctx);
}

CMatrix blmmse_estimate(const CMatrix& X_bin, const CMatrix& P_bin, const LmmseContext& ctx) {
    return lmmse_estimate(X_bin, P_bin, ctx);
}

CMatrix linear_residual_estimate(const CMatrix& H_ls, const CMatrix& W) {
    if (W.rows() != W.cols() || W.rows() != H_ls.cols())
        throw ShapeError("linear_residual_estimate: W must be (N+1) x (N+1)");
    return H_ls - matmul(H_ls, W);
}

CMatrix lmmse_residual_weights(const CMatrix& R_H, std::size_t M, double sigma_z_sq, std::size_t C) {
    if (!(sigma_z_sq > 0.0)) throw DomainError("lmmse_residual_weights: sigma_z_sq must be > 0");
    const std::size_t n = R_H.rows();
    CMatrix a = R_H * cplx(static_cast<double>(C) / (static_cast<double>(M) * sigma_z_sq));
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
    return solve_hermitian(a, CMatrix::identity(n));
}

std::vector<std::size_t> direct_columns() { return {0}; }

std::vector<std::size_t> cascaded_columns(std::size_t N) {
    std::vector<std::size_t> cols(N);
    for (std::size_t n = 0; n < N; ++n) cols[n] = n + 1;
    return cols;
}

std::pair<double, double> masked_error(const CMatrix& estimate, const CMatrix& truth,
                                       std::span<const std::size_t> column_mask) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw ShapeError("nmse: estimate and truth shapes differ");
    double err = 0.0, energy = 0.0;
    if (column_mask.empty()) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            err += std::norm(estimate.data()[i] - truth.data()[i]);
            energy += std::norm(truth.data()[i]);
        }
        return {err, energy};
    }
    for (std::size_t c : column_mask) {
        if (c >= truth.cols()) throw ShapeError("nmse: column mask out of range");
        for (std::size_t r = 0; r < truth.rows(); ++r) {
            err += std::norm(estimate(r, c) - truth(r, c));
            energy += std::norm(truth(r, c));
        }
    }
    return {err, energy};
}

double nmse(std::span<const CMatrix> estimates, std::span<const CMatrix> truths,
            std::span<const std::size_t> column_mask) {
    if (estimates.size() != truths.size()) throw ShapeError("nmse: list lengths differ");
    double err = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const auto [e, p] = masked_error(estimates[i], truths[i], column_mask);
        err += e;
        energy += p;
    }
    if (!(energy > 0.0)) throw DomainError("nmse: ground-truth energy is zero");
    return err / energy;
}

EstimateReport make_report(std::string name, CMatrix estimate, const CMatrix& truth) {
    const auto d = masked_error(estimate, truth, direct_columns());
    const auto b = masked_error(estimate, truth, cascaded_columns(truth.cols() - 1));
    EstimateReport r{std::move(estimate), std::move(name), std::nullopt};
    if (d.second > 0.0 && b.second > 0.0) r.per_block_nmse = std::make_pair(d.first / d.second, b.first / b.second);
    return r;
}

}  // namespace irschest
