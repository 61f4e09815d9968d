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

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace irschest {

/// Philox4x32-10 block function (Salmon et al., Random123). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Fold a path of integers into a 64-bit stream id with the SplitMix64 finalizer.
std::uint64_t derive_stream(std::initializer_list<std::uint64_t> path) noexcept;

/// Counter-based generator.
///
/// Block i of stream s under seed k is philox4x32_10({lo(i), hi(i), lo(s), hi(s)},
/// {lo(k), hi(k)}); each block yields two 64-bit words (low word first). Doubles take the
/// top 53 bits of a word. Gaussians use Box-Muller on two consecutive uniforms. Changing any
/// of this invalidates every stored dataset, model and CSV produced with a given seed.
class SeededRng {
public:
    SeededRng(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : seed_(master_seed), stream_(stream_id) {}

    std::uint64_t master_seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1).
    double uniform() noexcept;

    /// Standard normal.
    double normal() noexcept;

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> cscg(double variance) noexcept;

    /// Uniform index in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// First element of every derive_stream path, one per consumer of randomness.
namespace stream_tag {
inline constexpr std::uint64_t dataset = 1;
inline constexpr std::uint64_t trial = 2;
inline constexpr std::uint64_t correlation = 3;
inline constexpr std::uint64_t split = 4;
inline constexpr std::uint64_t init = 5;
inline constexpr std::uint64_t shuffle = 6;
inline constexpr std::uint64_t visualize = 7;
inline constexpr std::uint64_t dataset_snr = 8;
}  // namespace stream_tag

}  // namespace irschest
