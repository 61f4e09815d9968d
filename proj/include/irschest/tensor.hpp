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

namespace irschest {

/// Dense real tensor in batch x height x width x channels order (channels fastest).
struct Tensor4 {
    std::size_t batch = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(std::size_t b, std::size_t h, std::size_t w, std::size_t c)
        : batch(b), height(h), width(w), channels(c), data(b * h * w * c, 0.0) {}

    std::size_t size() const noexcept { return data.size(); }
    std::size_t sample_size() const noexcept { return height * width * channels; }
    bool same_shape(const Tensor4& o) const noexcept {
        return batch == o.batch && height == o.height && width == o.width && channels == o.channels;
    }

    double& operator()(std::size_t b, std::size_t h, std::size_t w, std::size_t c) noexcept {
        return data[((b * height + h) * width + w) * channels + c];
    }
    double operator()(std::size_t b, std::size_t h, std::size_t w, std::size_t c) const noexcept {
        return data[((b * height + h) * width + w) * channels + c];
    }

    std::span<double> sample(std::size_t b) noexcept { return {data.data() + b * sample_size(), sample_size()}; }
    std::span<const double> sample(std::size_t b) const noexcept {
        return {data.data() + b * sample_size(), sample_size()};
    }

    bool operator==(const Tensor4&) const = default;
};

/// 1 x M x (N+1) x 2 tensor: channel 0 real part, channel 1 imaginary part.
Tensor4 to_real_input(const CMatrix& x);

/// Inverse of to_real_input for sample b. ShapeError unless channels == 2.
CMatrix from_real_output(const Tensor4& t, std::size_t b = 0);

/// Writes x into sample b of a two-channel batch tensor.
void store_sample(Tensor4& t, std::size_t b, const CMatrix& x);

/// Contiguous copy of samples [first, first + count).
Tensor4 slice_batch(const Tensor4& t, std::size_t first, std::size_t count);

/// Gathers the listed samples into a new batch.
Tensor4 gather_batch(const Tensor4& t, std::span<const std::size_t> indices);

}  // namespace irschest
