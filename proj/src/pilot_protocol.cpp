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

#include "irschest/pilot_protocol.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "irschest/errors.hpp"

namespace irschest {

namespace {

// exp(j 2 pi (a b mod n) / n); the reduction keeps the phase argument small and exact.
cplx dft_entry(std::size_t a, std::size_t b, std::size_t n) {
    const std::size_t e = (a * b) % n;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n));
}

}  // namespace

CMatrix build_dft_patterns(std::size_t N, std::size_t C) {
    if (C < N + 1) {
        std::ostringstream os;
        os << "build_dft_patterns: need C >= N + 1 (N = " << N << ", C = " << C << ")";
        throw ProtocolError(os.str());
    }
    CMatrix p(N + 1, C);
    for (std::size_t n = 0; n <= N; ++n)
        for (std::size_t c = 0; c < C; ++c) p(n, c) = dft_entry(n, c, C);
    return p;
}

CMatrix build_binary_patterns(std::size_t N) {
    CMatrix p(N + 1, N + 1);
    for (std::size_t c = 0; c <= N; ++c) p(0, c) = 1.0;
    for (std::size_t n = 1; n <= N; ++n) p(n, n) = 1.0;
    return p;
}

CMatrix build_pilot_sequences(std::size_t K, std::size_t L, double power) {
    if (L < K) throw ProtocolError("build_pilot_sequences: need L >= K");
    if (!(power > 0.0)) throw DomainError("build_pilot_sequences: power must be > 0");
    const double amp = std::sqrt(power);
    CMatrix u(L, K);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t k = 0; k < K; ++k) u(l, k) = amp * dft_entry(l, k, L);
    return u;
}

PilotBook make_dft_book(const SystemConfig& cfg) {
    cfg.validate();
    return {build_dft_patterns(cfg.N, cfg.C), build_pilot_sequences(cfg.K, cfg.L, cfg.tx_power),
            PatternKind::Dft, cfg.tx_power};
}

PilotBook make_binary_book(const SystemConfig& cfg) {
    cfg.validate();
    return {build_binary_patterns(cfg.N), build_pilot_sequences(cfg.K, cfg.L, cfg.tx_power),
            PatternKind::Binary, cfg.tx_power};
}

ReceivedFrames synthesize_rx(const ChannelRealization& chan, const PilotBook& book, double sigma_v_sq,
                             SeededRng& rng) {
    if (chan.H.size() != book.users()) throw ShapeError("synthesize_rx: user count differs from pilot book");
    if (chan.H.empty()) throw ShapeError("synthesize_rx: no users");
    const std::size_t M = chan.H.front().rows();
    for (const CMatrix& h : chan.H)
        if (h.rows() != M || h.cols() != book.P.rows())
            throw ShapeError("synthesize_rx: channel shape does not match pattern matrix");

    ReceivedFrames out;
    out.sigma_v_sq = sigma_v_sq;
    out.slots.reserve(book.subframes());
    const std::size_t L = book.pilot_length();
    for (std::size_t c = 0; c < book.subframes(); ++c) {
        CMatrix s = sample_cscg(M, L, sigma_v_sq, rng);
        const CMatrix pc = book.P.column(c);
        for (std::size_t k = 0; k < book.users(); ++k) {
            const CMatrix y = matmul(chan.H[k], pc);  // M x 1
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t l = 0; l < L; ++l) s(m, l) += y(m, 0) * std::conj(book.U(l, k));
        }
        out.slots.push_back(std::move(s));
    }
    return out;
}

UserObservation separate_user(const ReceivedFrames& frames, const PilotBook& book, std::size_t k) {
    if (k >= book.users()) throw ProtocolError("separate_user: user index out of range");
    if (frames.slots.size() != book.subframes()) throw ShapeError("separate_user: sub-frame count mismatch");
    const std::size_t L = book.pilot_length();
    const double norm = 1.0 / (book.tx_power * static_cast<double>(L));
    const std::size_t M = frames.slots.front().rows();
    UserObservation obs{CMatrix(M, book.subframes()), k,
                        frames.sigma_v_sq / (book.tx_power * static_cast<double>(L))};
    for (std::size_t c = 0; c < frames.slots.size(); ++c) {
        const CMatrix& s = frames.slots[c];
        if (s.rows() != M || s.cols() != L) throw ShapeError("separate_user: slot shape mismatch");
        for (std::size_t m = 0; m < M; ++m) {
            cplx acc{};
            for (std::size_t l = 0; l < L; ++l) acc += s(m, l) * book.U(l, k);
            obs.X(m, c) = acc * norm;
        }
    }
    return obs;
}

UserObservation direct_observation(const CMatrix& H, const CMatrix& P, double sigma_z_sq, SeededRng& rng,
                                   std::size_t user_index) {
    if (!(sigma_z_sq >= 0.0)) throw DomainError("direct_observation: sigma_z_sq must be >= 0");
    UserObservation obs{matmul(H, P), user_index, sigma_z_sq};
    if (sigma_z_sq > 0.0) obs.X += sample_cscg(H.rows(), P.cols(), sigma_z_sq, rng);
    return obs;
}

}  // namespace irschest
