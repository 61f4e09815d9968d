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
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "irschest/linalg.hpp"
#include "irschest/rng.hpp"
#include "irschest/tensor.hpp"

namespace irschest {

/// Network shape. Every block has layers_per_block conv layers: the first maps in_channels to
/// filters, the middle ones filters to filters, the last filters back to in_channels. All but
/// the last are followed by batch normalization and ReLU.
struct CdrnConfig {
    std::size_t blocks = 3;
    std::size_t layers_per_block = 4;
    std::size_t filters = 64;
    std::size_t kernel = 3;
    std::size_t in_channels = 2;

    void validate() const;
    bool operator==(const CdrnConfig&) const = default;
};

struct BatchNormParams {
    std::vector<double> scale;
    std::vector<double> shift;
    std::vector<double> running_mean;
    std::vector<double> running_var;

    bool operator==(const BatchNormParams&) const = default;
};

/// 3x3 same-padded convolution without bias. weights are laid out
/// [out_channel][row][col][in_channel].
struct ConvLayer {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t kernel = 3;
    std::vector<double> weights;
    bool has_bn = false;
    BatchNormParams bn;

    std::size_t fan_in() const noexcept { return kernel * kernel * in_channels; }
    double& w(std::size_t o, std::size_t r, std::size_t c, std::size_t i) noexcept {
        return weights[((o * kernel + r) * kernel + c) * in_channels + i];
    }

    bool operator==(const ConvLayer&) const = default;
};

struct DenoisingBlock {
    std::vector<ConvLayer> layers;
    bool operator==(const DenoisingBlock&) const = default;
};

struct CdrnModel {
    CdrnConfig config;
    std::size_t height = 0;  ///< M
    std::size_t width = 0;   ///< N + 1
    std::vector<DenoisingBlock> blocks;
    double input_scale = 1.0;
    double trained_snr_db = std::numeric_limits<double>::quiet_NaN();
};

enum class Mode { Train, Infer };

struct ForwardOptions {
    /// Train mode only: fold batch statistics into the running estimates (momentum 0.9).
    bool update_running_stats = true;
    /// Skips every batch normalization and ReLU. Used to check the network against its
    /// linear-algebra reading; not meant for training.
    bool linear = false;
};

constexpr double kBatchNormEpsilon = 1e-5;
constexpr double kBatchNormMomentum = 0.9;

/// He-initialized model (weights ~ N(0, 2 / fan_in), BN scale 1 and shift 0).
CdrnModel make_model(const CdrnConfig& cfg, std::size_t height, std::size_t width, SeededRng& rng);

/// Zeroes the final conv of every block, which makes the network the identity map.
void zero_residual_outputs(CdrnModel& model);

Tensor4 conv2d(const Tensor4& input, const ConvLayer& layer);

/// Train mode normalizes with batch statistics (and folds them into the running estimates
/// when update_stats is set); infer mode uses the running estimates.
Tensor4 batchnorm(const Tensor4& input, BatchNormParams& params, Mode mode, bool update_stats = true);
Tensor4 batchnorm(const Tensor4& input, const BatchNormParams& params);

struct BlockOutput {
    Tensor4 next;
    Tensor4 residual;
};

BlockOutput denoising_block_forward(const Tensor4& a_prev, DenoisingBlock& block, Mode mode,
                                    const ForwardOptions& opts = {});

struct ForwardResult {
    Tensor4 output;
    std::vector<Tensor4> stages;     ///< A_0 .. A_D
    std::vector<Tensor4> residuals;  ///< R_1 .. R_D
};

ForwardResult cdrn_forward(const Tensor4& input, CdrnModel& model, Mode mode, const ForwardOptions& opts = {});

/// Inference on an immutable model; safe to call concurrently.
ForwardResult cdrn_forward(const Tensor4& input, const CdrnModel& model, const ForwardOptions& opts = {});

/// (1 / (2 batch)) sum (pred - target)^2.
double loss_mse(const Tensor4& pred, const Tensor4& target);

struct LayerGradient {
    std::vector<double> weights;
    std::vector<double> scale;
    std::vector<double> shift;
};

struct ModelGradient {
    std::vector<std::vector<LayerGradient>> blocks;
};

struct LossAndGradient {
    double loss = 0.0;
    ModelGradient gradient;
};

/// Train-mode forward pass followed by exact backpropagation of loss_mse.
LossAndGradient backward(CdrnModel& model, const Tensor4& input, const Tensor4& target,
                         const ForwardOptions& opts = {});

/// Trainable parameters (conv weights, BN scale, BN shift) in a fixed order.
std::vector<std::span<double>> parameter_spans(CdrnModel& model);
std::vector<std::span<double>> gradient_spans(ModelGradient& grad);

/// Batched inference over a large tensor in chunks; input already scaled.
Tensor4 cdrn_infer(const CdrnModel& model, const Tensor4& input, std::size_t chunk = 256);

/// Scales the LS estimate, runs inference, and undoes the scaling.
CMatrix cdrn_estimate(const CdrnModel& model, const CMatrix& x_ls);

/// Rounds every parameter and running statistic to single precision.
void quantize_to_float(CdrnModel& model);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    std::size_t epochs = 20;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    double validation_fraction = 0.1;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
    double train_loss = 0.0;
    double validation_loss = 0.0;
};

struct TrainingSet;

struct TrainResult {
    CdrnModel model;
    double initial_train_loss = 0.0;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;  ///< index into history
};

/// Adam on loss_mse of the scaled pairs. Returns the parameters of the epoch with the lowest
/// validation loss, rounded to single precision.
TrainResult train(const TrainingSet& data, const CdrnConfig& net, const TrainConfig& cfg);

/// Binary little-endian model file; see README for the layout.
void save_model(const CdrnModel& model, const std::filesystem::path& path);
CdrnModel load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_model(const CdrnModel& model);
CdrnModel deserialize_model(std::span<const std::uint8_t> bytes);

}  // namespace irschest
