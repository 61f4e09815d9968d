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

// Shared kernels of the CDRN forward and backward passes.

#include <Eigen/Core>

#include "irschest/cdrn.hpp"

namespace irschest::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

/// (batch * H * W) x (k * k * C_in) patch matrix with zero padding.
RowMatrix im2col(const Tensor4& x, std::size_t kernel);

/// Scatter-add of a patch-matrix gradient back onto an input-shaped tensor.
void col2im(const RowMatrix& cols, std::size_t kernel, Tensor4& dx);

inline ConstRowMap weight_matrix(const ConvLayer& layer) {
    return ConstRowMap(layer.weights.data(), static_cast<Eigen::Index>(layer.out_channels),
                       static_cast<Eigen::Index>(layer.fan_in()));
}

/// Cached batch statistics of one train-mode normalization.
struct BatchNormCache {
    std::vector<double> xhat;
    std::vector<double> inv_std;
};

/// Train-mode batch normalization that records what the backward pass needs.
Tensor4 batchnorm_train(const Tensor4& x, BatchNormParams& p, bool update_stats, BatchNormCache* cache);

}  // namespace irschest::detail
