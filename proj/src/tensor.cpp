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

#include "irschest/tensor.hpp"

#include <algorithm>

#include "irschest/errors.hpp"

namespace irschest {

Tensor4 to_real_input(const CMatrix& x) {
    Tensor4 t(1, x.rows(), x.cols(), 2);
    store_sample(t, 0, x);
    return t;
}

CMatrix from_real_output(const Tensor4& t, std::size_t b) {
    if (t.channels != 2) throw ShapeError("from_real_output: tensor must have exactly 2 channels");
    if (b >= t.batch) throw ShapeError("from_real_output: sample index out of range");
    CMatrix x(t.height, t.width);
    for (std::size_t h = 0; h < t.height; ++h)
        for (std::size_t w = 0; w < t.width; ++w) x(h, w) = cplx(t(b, h, w, 0), t(b, h, w, 1));
    return x;
}

void store_sample(Tensor4& t, std::size_t b, const CMatrix& x) {
    if (t.channels != 2 || t.height != x.rows() || t.width != x.cols() || b >= t.batch)
        throw ShapeError("store_sample: tensor does not match matrix shape");
    for (std::size_t h = 0; h < t.height; ++h) {
        for (std::size_t w = 0; w < t.width; ++w) {
            t(b, h, w, 0) = x(h, w).real();
            t(b, h, w, 1) = x(h, w).imag();
        }
    }
}

Tensor4 slice_batch(const Tensor4& t, std::size_t first, std::size_t count) {
    if (first + count > t.batch) throw ShapeError("slice_batch: range exceeds batch");
    Tensor4 out(count, t.height, t.width, t.channels);
    const auto begin = t.data.begin() + static_cast<std::ptrdiff_t>(first * t.sample_size());
    std::copy(begin, begin + static_cast<std::ptrdiff_t>(count * t.sample_size()), out.data.begin());
    return out;
}

Tensor4 gather_batch(const Tensor4& t, std::span<const std::size_t> indices) {
    Tensor4 out(indices.size(), t.height, t.width, t.channels);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= t.batch) throw ShapeError("gather_batch: index out of range");
        const auto src = t.sample(indices[i]);
        std::copy(src.begin(), src.end(), out.sample(i).begin());
    }
    return out;
}

}  // namespace irschest
