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

#include <cmath>
#include <sstream>

#include "cdrn_internal.hpp"
#include "irschest/errors.hpp"

namespace irschest {

void CdrnConfig::validate() const {
    if (blocks < 1) throw ConfigError("CdrnConfig: blocks must be >= 1");
    if (layers_per_block < 2) throw ConfigError("CdrnConfig: layers_per_block must be >= 2");
    if (filters < 1) throw ConfigError("CdrnConfig: filters must be >= 1");
    if (kernel != 3) throw ConfigError("CdrnConfig: only 3x3 kernels are supported");
    if (in_channels != 2) throw ConfigError("CdrnConfig: in_channels must be 2 (real, imaginary)");
}

namespace detail {

RowMatrix im2col(const Tensor4& x, std::size_t kernel) {
    const std::size_t H = x.height, W = x.width, C = x.channels;
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(kernel / 2);
    RowMatrix cols = RowMatrix::Zero(static_cast<Eigen::Index>(x.batch * H * W),
                                     static_cast<Eigen::Index>(kernel * kernel * C));
    std::size_t row = 0;
    for (std::size_t b = 0; b < x.batch; ++b) {
        for (std::size_t h = 0; h < H; ++h) {
            for (std::size_t w = 0; w < W; ++w, ++row) {
                double* dst = cols.data() + row * kernel * kernel * C;
                for (std::size_t kh = 0; kh < kernel; ++kh) {
                    const std::ptrdiff_t sh = static_cast<std::ptrdiff_t>(h + kh) - pad;
                    if (sh < 0 || sh >= static_cast<std::ptrdiff_t>(H)) continue;
                    for (std::size_t kw = 0; kw < kernel; ++kw) {
                        const std::ptrdiff_t sw = static_cast<std::ptrdiff_t>(w + kw) - pad;
                        if (sw < 0 || sw >= static_cast<std::ptrdiff_t>(W)) continue;
                        const double* src = &x.data[((b * H + static_cast<std::size_t>(sh)) * W +
                                                     static_cast<std::size_t>(sw)) * C];
                        std::copy(src, src + C, dst + (kh * kernel + kw) * C);
                    }
                }
            }
        }
    }
    return cols;
}

void col2im(const RowMatrix& cols, std::size_t kernel, Tensor4& dx) {
    const std::size_t H = dx.height, W = dx.width, C = dx.channels;
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(kernel / 2);
    std::size_t row = 0;
    for (std::size_t b = 0; b < dx.batch; ++b) {
        for (std::size_t h = 0; h < H; ++h) {
            for (std::size_t w = 0; w < W; ++w, ++row) {
                const double* src = cols.data() + row * kernel * kernel * C;
                for (std::size_t kh = 0; kh < kernel; ++kh) {
                    const std::ptrdiff_t sh = static_cast<std::ptrdiff_t>(h + kh) - pad;
                    if (sh < 0 || sh >= static_cast<std::ptrdiff_t>(H)) continue;
                    for (std::size_t kw = 0; kw < kernel; ++kw) {
                        const std::ptrdiff_t sw = static_cast<std::ptrdiff_t>(w + kw) - pad;
                        if (sw < 0 || sw >= static_cast<std::ptrdiff_t>(W)) continue;
                        double* dst = &dx.data[((b * H + static_cast<std::size_t>(sh)) * W +
                                                static_cast<std::size_t>(sw)) * C];
                        const double* s = src + (kh * kernel + kw) * C;
                        for (std::size_t c = 0; c < C; ++c) dst[c] += s[c];
                    }
                }
            }
        }
    }
}

Tensor4 batchnorm_train(const Tensor4& x, BatchNormParams& p, bool update_stats, BatchNormCache* cache) {
    const std::size_t C = x.channels;
    if (p.scale.size() != C) throw ShapeError("batchnorm: parameter count does not match channels");
    const std::size_t n = x.size() / C;
    std::vector<double> mean(C, 0.0), var(C, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) mean[c] += x.data[i * C + c];
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < C; ++c) {
            const double d = x.data[i * C + c] - mean[c];
            var[c] += d * d;
        }
    }
    for (double& v : var) v /= static_cast<double>(n);

    std::vector<double> inv_std(C);
    for (std::size_t c = 0; c < C; ++c) inv_std[c] = 1.0 / std::sqrt(var[c] + kBatchNormEpsilon);

    Tensor4 y(x.batch, x.height, x.width, C);
    if (cache) cache->xhat.resize(x.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < C; ++c) {
            const double xh = (x.data[i * C + c] - mean[c]) * inv_std[c];
            if (cache) cache->xhat[i * C + c] = xh;
            y.data[i * C + c] = p.scale[c] * xh + p.shift[c];
        }
    }
    if (cache) cache->inv_std = inv_std;

    if (update_stats) {
        const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
        for (std::size_t c = 0; c < C; ++c) {
            p.running_mean[c] = kBatchNormMomentum * p.running_mean[c] + (1.0 - kBatchNormMomentum) * mean[c];
            p.running_var[c] =
                kBatchNormMomentum * p.running_var[c] + (1.0 - kBatchNormMomentum) * var[c] * unbias;
        }
    }
    return y;
}

}  // namespace detail

CdrnModel make_model(const CdrnConfig& cfg, std::size_t height, std::size_t width, SeededRng& rng) {
    cfg.validate();
    if (height == 0 || width == 0) throw ConfigError("make_model: input shape must be positive");
    CdrnModel model;
    model.config = cfg;
    model.height = height;
    model.width = width;
    model.blocks.resize(cfg.blocks);
    for (auto& block : model.blocks) {
        block.layers.resize(cfg.layers_per_block);
        for (std::size_t l = 0; l < cfg.layers_per_block; ++l) {
            ConvLayer& layer = block.layers[l];
            const bool last = l + 1 == cfg.layers_per_block;
            layer.in_channels = l == 0 ? cfg.in_channels : cfg.filters;
            layer.out_channels = last ? cfg.in_channels : cfg.filters;
            layer.kernel = cfg.kernel;
            layer.weights.resize(layer.out_channels * layer.fan_in());
            const double stddev = std::sqrt(2.0 / static_cast<double>(layer.fan_in()));
            for (double& w : layer.weights) w = stddev * rng.normal();
            layer.has_bn = !last;
            if (layer.has_bn) {
                const std::size_t c = layer.out_channels;
                layer.bn = {std::vector<double>(c, 1.0), std::vector<double>(c, 0.0), std::vector<double>(c, 0.0),
                            std::vector<double>(c, 1.0)};
            }
        }
    }
    return model;
}

void zero_residual_outputs(CdrnModel& model) {
    for (auto& block : model.blocks) std::fill(block.layers.back().weights.begin(), block.layers.back().weights.end(), 0.0);
}

Tensor4 conv2d(const Tensor4& input, const ConvLayer& layer) {
    if (input.channels != layer.in_channels) {
        std::ostringstream os;
        os << "conv2d: input has " << input.channels << " channels, kernel expects " << layer.in_channels;
        throw ShapeError(os.str());
    }
    if (layer.weights.size() != layer.out_channels * layer.fan_in())
        throw ShapeError("conv2d: kernel bank has the wrong size");
    const detail::RowMatrix cols = detail::im2col(input, layer.kernel);
    Tensor4 out(input.batch, input.height, input.width, layer.out_channels);
    detail::RowMap(out.data.data(), cols.rows(), static_cast<Eigen::Index>(layer.out_channels)).noalias() =
        cols * detail::weight_matrix(layer).transpose();
    return out;
}

Tensor4 batchnorm(const Tensor4& input, BatchNormParams& params, Mode mode, bool update_stats) {
    if (mode == Mode::Train) return detail::batchnorm_train(input, params, update_stats, nullptr);
    return batchnorm(input, static_cast<const BatchNormParams&>(params));
}

Tensor4 batchnorm(const Tensor4& input, const BatchNormParams& p) {
    const std::size_t C = input.channels;
    if (p.scale.size() != C) throw ShapeError("batchnorm: parameter count does not match channels");
    std::vector<double> a(C), b(C);
    for (std::size_t c = 0; c < C; ++c) {
        a[c] = p.scale[c] / std::sqrt(p.running_var[c] + kBatchNormEpsilon);
        b[c] = p.shift[c] - a[c] * p.running_mean[c];
    }
    Tensor4 y(input.batch, input.height, input.width, C);
    const std::size_t n = input.size() / C;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) y.data[i * C + c] = a[c] * input.data[i * C + c] + b[c];
    return y;
}

double loss_mse(const Tensor4& pred, const Tensor4& target) {
    if (!pred.same_shape(target)) throw ShapeError("loss_mse: shapes differ");
    if (pred.batch == 0) throw ShapeError("loss_mse: empty batch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        s += d * d;
    }
    return s / (2.0 * static_cast<double>(pred.batch));
}

void quantize_to_float(CdrnModel& model) {
    auto q = [](std::vector<double>& v) {
        for (double& x : v) x = static_cast<double>(static_cast<float>(x));
    };
    for (auto& block : model.blocks) {
        for (auto& layer : block.layers) {
            q(layer.weights);
            q(layer.bn.scale);
            q(layer.bn.shift);
            q(layer.bn.running_mean);
            q(layer.bn.running_var);
        }
    }
}

}  // namespace irschest
