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

#include <algorithm>
#include <sstream>
#include <type_traits>

#include "cdrn_internal.hpp"
#include "irschest/errors.hpp"

namespace irschest {

namespace {

struct LayerTape {
    Tensor4 input;
    detail::BatchNormCache bn;
};

struct BlockTape {
    std::vector<LayerTape> layers;
};

void relu_inplace(Tensor4& t) {
    for (double& x : t.data) x = x > 0.0 ? x : 0.0;
}

template <typename Block>
BlockOutput run_block(const Tensor4& in, Block& block, Mode mode, const ForwardOptions& opts, BlockTape* tape) {
    if (in.channels != 2) throw ShapeError("denoising block: input must have 2 channels");
    if (block.layers.empty()) throw ShapeError("denoising block: no layers");
    if (tape) tape->layers.resize(block.layers.size());

    Tensor4 x = in;
    for (std::size_t l = 0; l < block.layers.size(); ++l) {
        auto& layer = block.layers[l];
        Tensor4 y = conv2d(x, layer);
        if (tape) tape->layers[l].input = std::move(x);
        if (layer.has_bn && !opts.linear) {
            if constexpr (std::is_const_v<Block>) {
                y = batchnorm(y, layer.bn);
            } else {
                if (mode == Mode::Train)
                    y = detail::batchnorm_train(y, layer.bn, opts.update_running_stats,
                                                tape ? &tape->layers[l].bn : nullptr);
                else
                    y = batchnorm(y, static_cast<const BatchNormParams&>(layer.bn));
            }
            relu_inplace(y);
        }
        x = std::move(y);
    }
    if (x.channels != in.channels) throw ShapeError("denoising block: residual must have 2 channels");

    BlockOutput out{in, std::move(x)};
    for (std::size_t i = 0; i < out.next.size(); ++i) out.next.data[i] -= out.residual.data[i];
    return out;
}

template <typename Model>
ForwardResult run_forward(const Tensor4& input, Model& model, Mode mode, const ForwardOptions& opts,
                          std::vector<BlockTape>* tapes) {
    if (input.channels != 2) throw ShapeError("cdrn_forward: input must have 2 channels");
    if (model.blocks.empty()) throw ShapeError("cdrn_forward: model has no blocks");
    ForwardResult r;
    r.stages.reserve(model.blocks.size() + 1);
    r.residuals.reserve(model.blocks.size());
    r.stages.push_back(input);
    if (tapes) tapes->resize(model.blocks.size());
    for (std::size_t d = 0; d < model.blocks.size(); ++d) {
        BlockOutput b = run_block(r.stages.back(), model.blocks[d], mode, opts, tapes ? &(*tapes)[d] : nullptr);
        r.residuals.push_back(std::move(b.residual));
        r.stages.push_back(std::move(b.next));
    }
    r.output = r.stages.back();
    return r;
}

// Backpropagates through one block. d_next is dJ/dA_d; returns dJ/dA_{d-1} when requested.
Tensor4 block_backward(const DenoisingBlock& block, const BlockTape& tape, const Tensor4& d_next,
                       std::vector<LayerGradient>& grads, const ForwardOptions& opts, bool need_input_grad) {
    Tensor4 g = d_next;
    for (double& x : g.data) x = -x;  // A_d = A_{d-1} - R(A_{d-1})

    for (std::size_t l = block.layers.size(); l-- > 0;) {
        const ConvLayer& layer = block.layers[l];
        const LayerTape& t = tape.layers[l];
        LayerGradient& lg = grads[l];

        if (layer.has_bn && !opts.linear) {
            const Tensor4& post = tape.layers[l + 1].input;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!(post.data[i] > 0.0)) g.data[i] = 0.0;

            const std::size_t C = g.channels;
            const std::size_t n = g.size() / C;
            std::vector<double> sum_dy(C, 0.0), sum_dy_xhat(C, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < C; ++c) {
                    sum_dy[c] += g.data[i * C + c];
                    sum_dy_xhat[c] += g.data[i * C + c] * t.bn.xhat[i * C + c];
                }
            }
            for (std::size_t c = 0; c < C; ++c) {
                lg.scale[c] += sum_dy_xhat[c];
                lg.shift[c] += sum_dy[c];
            }
            const double nn = static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < C; ++c) {
                    const double k = layer.bn.scale[c] * t.bn.inv_std[c] / nn;
                    g.data[i * C + c] =
                        k * (nn * g.data[i * C + c] - sum_dy[c] - t.bn.xhat[i * C + c] * sum_dy_xhat[c]);
                }
            }
        }

        const detail::RowMatrix cols = detail::im2col(t.input, layer.kernel);
        const auto rows = static_cast<Eigen::Index>(g.size() / g.channels);
        detail::ConstRowMap gm(g.data.data(), rows, static_cast<Eigen::Index>(g.channels));
        detail::RowMap(lg.weights.data(), static_cast<Eigen::Index>(layer.out_channels),
                       static_cast<Eigen::Index>(layer.fan_in())).noalias() += gm.transpose() * cols;

        if (l == 0 && !need_input_grad) return {};
        detail::RowMatrix dcols = gm * detail::weight_matrix(layer);
        Tensor4 dx(t.input.batch, t.input.height, t.input.width, t.input.channels);
        detail::col2im(dcols, layer.kernel, dx);
        g = std::move(dx);
    }
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += d_next.data[i];
    return g;
}

ModelGradient zero_gradient(const CdrnModel& model) {
    ModelGradient grad;
    grad.blocks.resize(model.blocks.size());
    for (std::size_t d = 0; d < model.blocks.size(); ++d) {
        for (const ConvLayer& layer : model.blocks[d].layers) {
            LayerGradient lg;
            lg.weights.assign(layer.weights.size(), 0.0);
            if (layer.has_bn) {
                lg.scale.assign(layer.out_channels, 0.0);
                lg.shift.assign(layer.out_channels, 0.0);
            }
            grad.blocks[d].push_back(std::move(lg));
        }
    }
    return grad;
}

}  // namespace

BlockOutput denoising_block_forward(const Tensor4& a_prev, DenoisingBlock& block, Mode mode,
                                    const ForwardOptions& opts) {
    return run_block(a_prev, block, mode, opts, nullptr);
}

ForwardResult cdrn_forward(const Tensor4& input, CdrnModel& model, Mode mode, const ForwardOptions& opts) {
    return run_forward(input, model, mode, opts, nullptr);
}

ForwardResult cdrn_forward(const Tensor4& input, const CdrnModel& model, const ForwardOptions& opts) {
    return run_forward(input, model, Mode::Infer, opts, nullptr);
}

LossAndGradient backward(CdrnModel& model, const Tensor4& input, const Tensor4& target, const ForwardOptions& opts) {
    std::vector<BlockTape> tapes;
    const ForwardResult fwd = run_forward(input, model, Mode::Train, opts, &tapes);
    LossAndGradient out{loss_mse(fwd.output, target), zero_gradient(model)};

    Tensor4 g = fwd.output;
    const double inv_batch = 1.0 / static_cast<double>(input.batch);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = (fwd.output.data[i] - target.data[i]) * inv_batch;

    for (std::size_t d = model.blocks.size(); d-- > 0;)
        g = block_backward(model.blocks[d], tapes[d], g, out.gradient.blocks[d], opts, d > 0);
    return out;
}

std::vector<std::span<double>> parameter_spans(CdrnModel& model) {
    std::vector<std::span<double>> spans;
    for (auto& block : model.blocks) {
        for (auto& layer : block.layers) {
            spans.emplace_back(layer.weights);
            if (layer.has_bn) {
                spans.emplace_back(layer.bn.scale);
                spans.emplace_back(layer.bn.shift);
            }
        }
    }
    return spans;
}

std::vector<std::span<double>> gradient_spans(ModelGradient& grad) {
    std::vector<std::span<double>> spans;
    for (auto& block : grad.blocks) {
        for (auto& layer : block) {
            spans.emplace_back(layer.weights);
            if (!layer.scale.empty()) {
                spans.emplace_back(layer.scale);
                spans.emplace_back(layer.shift);
            }
        }
    }
    return spans;
}

Tensor4 cdrn_infer(const CdrnModel& model, const Tensor4& input, std::size_t chunk) {
    if (input.height != model.height || input.width != model.width) {
        std::ostringstream os;
        os << "cdrn_infer: model expects " << model.height << "x" << model.width << " inputs, got " << input.height
           << "x" << input.width;
        throw ShapeError(os.str());
    }
    Tensor4 out(input.batch, input.height, input.width, input.channels);
    chunk = std::max<std::size_t>(chunk, 1);
    for (std::size_t first = 0; first < input.batch; first += chunk) {
        const std::size_t count = std::min(chunk, input.batch - first);
        const ForwardResult r = cdrn_forward(slice_batch(input, first, count), model);
        std::copy(r.output.data.begin(), r.output.data.end(),
                  out.data.begin() + static_cast<std::ptrdiff_t>(first * input.sample_size()));
    }
    return out;
}

CMatrix cdrn_estimate(const CdrnModel& model, const CMatrix& x_ls) {
    if (x_ls.rows() != model.height || x_ls.cols() != model.width)
        throw ShapeError("cdrn_estimate: input shape does not match the model");
    Tensor4 t = to_real_input(x_ls);
    for (double& v : t.data) v *= model.input_scale;
    CMatrix h = from_real_output(cdrn_forward(t, model).output);
    h *= 1.0 / model.input_scale;
    return h;
}

}  // namespace irschest
