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

#include "irschest/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "irschest/errors.hpp"

namespace irschest {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

CMatrix steering(std::size_t n, double angle) {
    CMatrix a(n, 1);
    const double phase = std::numbers::pi * std::sin(angle);
    for (std::size_t i = 0; i < n; ++i) a(i, 0) = std::polar(1.0, phase * static_cast<double>(i));
    return a;
}

}  // namespace

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("SystemConfig: " + msg); };
    if (M == 0 || N == 0 || K == 0 || C == 0 || L == 0) fail("all dimensions must be >= 1");
    if (C < N + 1) fail("C must be at least N + 1");
    if (L < K) fail("L must be at least K");
    if (!positive(tx_power)) fail("tx_power must be > 0");
    if (!positive(sigma_z_sq)) fail("sigma_z_sq must be > 0");
    if (!positive(dist_ub) || !positive(dist_ib) || !positive(dist_ui)) fail("distances must be > 0");
    if (!positive(ref_dist)) fail("ref_dist must be > 0");
    if (!positive(ref_loss)) fail("ref_loss must be > 0");
    if (!std::isfinite(exp_ub) || !std::isfinite(exp_ib) || !std::isfinite(exp_ui))
        fail("path-loss exponents must be finite");
    if (!non_negative(rice_ub) || !non_negative(rice_ib) || !non_negative(rice_ui))
        fail("Rician factors must be >= 0");
    for (const auto* v : {&user_dist_ub, &user_dist_ui}) {
        if (!v->empty() && v->size() != K) fail("per-user distance lists must have K entries");
        for (double x : *v)
            if (!positive(x)) fail("per-user distances must be > 0");
    }
}

double SystemConfig::user_distance_ub(std::size_t k) const {
    return user_dist_ub.empty() ? dist_ub : user_dist_ub.at(k);
}

double SystemConfig::user_distance_ui(std::size_t k) const {
    return user_dist_ui.empty() ? dist_ui : user_dist_ui.at(k);
}

double path_loss(double distance, double exponent, double ref_loss, double ref_dist) {
    if (!(distance > 0.0)) throw DomainError("path_loss: distance must be > 0");
    if (!(ref_dist > 0.0)) throw DomainError("path_loss: reference distance must be > 0");
    return ref_loss * std::pow(distance / ref_dist, -exponent);
}

CMatrix los_component(std::size_t rows, std::size_t cols, SeededRng& rng) {
    const double theta_r = 2.0 * std::numbers::pi * rng.uniform();
    const double theta_t = 2.0 * std::numbers::pi * rng.uniform();
    return matmul_nh(steering(rows, theta_r), steering(cols, theta_t));
}

CMatrix sample_rician(std::size_t rows, std::size_t cols, double rice_factor, const CMatrix& los,
                      SeededRng& rng) {
    if (!(rice_factor >= 0.0)) throw DomainError("sample_rician: Rician factor must be >= 0");
    if (los.rows() != rows || los.cols() != cols)
        throw ShapeError("sample_rician: LOS component shape mismatch");
    for (const cplx& x : los.data())
        if (std::abs(std::abs(x) - 1.0) > 1e-9)
            throw DomainError("sample_rician: LOS entries must have unit modulus");
    const double a_los = std::sqrt(rice_factor / (rice_factor + 1.0));
    const double a_nlos = std::sqrt(1.0 / (rice_factor + 1.0));
    CMatrix h = sample_cscg(rows, cols, 1.0, rng);
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = a_los * los.data()[i] + a_nlos * h.data()[i];
    return h;
}

CMatrix cascade(const CMatrix& G, const CMatrix& f) {
    if (f.cols() != 1 || f.rows() != G.cols()) throw ShapeError("cascade: f must be N x 1 with N = G.cols()");
    CMatrix b = G;
    for (std::size_t m = 0; m < G.rows(); ++m)
        for (std::size_t n = 0; n < G.cols(); ++n) b(m, n) *= f(n, 0);
    return b;
}

CMatrix compose_channel(const CMatrix& d, const CMatrix& B) {
    if (d.cols() != 1 || d.rows() != B.rows()) throw ShapeError("compose_channel: d must be M x 1");
    CMatrix h(B.rows(), B.cols() + 1);
    for (std::size_t m = 0; m < B.rows(); ++m) {
        h(m, 0) = d(m, 0);
        for (std::size_t n = 0; n < B.cols(); ++n) h(m, n + 1) = B(m, n);
    }
    return h;
}

namespace {

// Rician draw with the LOS term sampled only when it contributes.
CMatrix draw_link(std::size_t rows, std::size_t cols, double rice, double gain, SeededRng& rng) {
    CMatrix h = rice > 0.0 ? sample_rician(rows, cols, rice, los_component(rows, cols, rng), rng)
                           : sample_cscg(rows, cols, 1.0, rng);
    h *= std::sqrt(gain);
    return h;
}

}  // namespace

ChannelRealization sample_channels(const SystemConfig& cfg, SeededRng& rng) {
    cfg.validate();
    ChannelRealization ch;
    const double a_ib = path_loss(cfg.dist_ib, cfg.exp_ib, cfg.ref_loss, cfg.ref_dist);
    ch.G = draw_link(cfg.M, cfg.N, cfg.rice_ib, a_ib, rng);
    ch.f.reserve(cfg.K);
    ch.d.reserve(cfg.K);
    ch.H.reserve(cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k) {
        const double a_ui = path_loss(cfg.user_distance_ui(k), cfg.exp_ui, cfg.ref_loss, cfg.ref_dist);
        const double a_ub = path_loss(cfg.user_distance_ub(k), cfg.exp_ub, cfg.ref_loss, cfg.ref_dist);
        ch.f.push_back(draw_link(cfg.N, 1, cfg.rice_ui, a_ui, rng));
        ch.d.push_back(draw_link(cfg.M, 1, cfg.rice_ub, a_ub, rng));
        ch.H.push_back(compose_channel(ch.d.back(), cascade(ch.G, ch.f.back())));
    }
    return ch;
}

void CorrelationAccumulator::add(const CMatrix& H) {
    if (count_ == 0) {
        sum_ = CMatrix(H.cols(), H.cols());
    } else if (H.cols() != sum_.cols()) {
        throw ShapeError("empirical_correlation: samples have differing shapes");
    }
    const std::size_t n = H.cols();
    for (std::size_t m = 0; m < H.rows(); ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx hi = std::conj(H(m, i));
            for (std::size_t j = 0; j < n; ++j) sum_(i, j) += hi * H(m, j);
        }
    }
    ++count_;
}

CMatrix CorrelationAccumulator::result() const {
    if (count_ == 0) throw DomainError("empirical_correlation: no samples");
    CMatrix r = sum_;
    r *= 1.0 / static_cast<double>(count_);
    return r;
}

CMatrix empirical_correlation(std::span<const CMatrix> samples) {
    if (samples.empty()) throw DomainError("empirical_correlation: no samples");
    CorrelationAccumulator acc;
    for (const CMatrix& h : samples) {
        if (h.rows() != samples.front().rows()) throw ShapeError("empirical_correlation: samples have differing shapes");
        acc.add(h);
    }
    return acc.result();
}

CMatrix analytic_correlation(const SystemConfig& cfg, std::size_t k) {
    cfg.validate();
    if (k >= cfg.K) throw DomainError("analytic_correlation: user index out of range");
    if (cfg.rice_ub != 0.0 || cfg.rice_ui != 0.0)
        throw ConfigError("analytic_correlation: requires rice_ub = rice_ui = 0");
    const double a_ib = path_loss(cfg.dist_ib, cfg.exp_ib, cfg.ref_loss, cfg.ref_dist);
    const double a_ui = path_loss(cfg.user_distance_ui(k), cfg.exp_ui, cfg.ref_loss, cfg.ref_dist);
    const double a_ub = path_loss(cfg.user_distance_ub(k), cfg.exp_ub, cfg.ref_loss, cfg.ref_dist);
    const double m = static_cast<double>(cfg.M);
    CMatrix r(cfg.N + 1, cfg.N + 1);
    r(0, 0) = m * a_ub;
    for (std::size_t n = 1; n <= cfg.N; ++n) r(n, n) = m * a_ib * a_ui;
    return r;
}

}  // namespace irschest
