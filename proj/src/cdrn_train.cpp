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
#include <cmath>

#include "irschest/cdrn.hpp"
#include "irschest/dataset.hpp"
#include "irschest/errors.hpp"

namespace irschest {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("TrainConfig: learning_rate must be >= 0");
    if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be positive");
    if (epochs == 0) throw ConfigError("TrainConfig: epochs must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw ConfigError("TrainConfig: moment decays must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("TrainConfig: epsilon must be > 0");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("TrainConfig: validation_fraction must lie in (0, 1)");
}

namespace {

void shuffle(std::vector<std::size_t>& v, SeededRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

double loss_sum(const CdrnModel& model, const Tensor4& x, const Tensor4& y) {
    if (x.batch == 0) return 0.0;
    const Tensor4 out = cdrn_infer(model, x);
    return loss_mse(out, y) * static_cast<double>(x.batch);
}

class Adam {
public:
    Adam(const std::vector<std::span<double>>& params, const TrainConfig& cfg) : cfg_(cfg) {
        for (const auto& p : params) {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }

    void step(const std::vector<std::span<double>>& params, const std::vector<std::span<double>>& grads) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t s = 0; s < params.size(); ++s) {
            auto& m = m_[s];
            auto& v = v_[s];
            for (std::size_t i = 0; i < params[s].size(); ++i) {
                const double g = grads[s][i];
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
                params[s][i] -= cfg_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
            }
        }
    }

private:
    TrainConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    std::size_t t_ = 0;
};

}  // namespace

TrainResult train(const TrainingSet& data, const CdrnConfig& net, const TrainConfig& cfg) {
    if (data.count() == 0) throw DomainError("train: empty dataset");
    if (!data.inputs.same_shape(data.targets)) throw ShapeError("train: inputs and targets differ in shape");
    net.validate();
    cfg.validate();

    const std::size_t n = data.count();
    double energy = 0.0;
    for (double x : data.inputs.data) energy += x * x;
    const double rms = std::sqrt(energy / static_cast<double>(n * data.inputs.height * data.inputs.width));
    const double scale = rms > 0.0 ? 1.0 / rms : 1.0;

    Tensor4 x = data.inputs, y = data.targets;
    for (double& v : x.data) v *= scale;
    for (double& v : y.data) v *= scale;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    SeededRng split_rng(cfg.seed, derive_stream({stream_tag::split}));
    shuffle(order, split_rng);
    std::size_t n_val = 0;
    if (n >= 2) {
        n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n)));
        n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    }
    const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    const Tensor4 x_val = gather_batch(x, val_idx), y_val = gather_batch(y, val_idx);

    SeededRng init_rng(cfg.seed, derive_stream({stream_tag::init}));
    TrainResult result;
    result.model = make_model(net, data.inputs.height, data.inputs.width, init_rng);
    CdrnModel& model = result.model;
    model.input_scale = scale;
    model.trained_snr_db = data.snr_db == data.snr_db_max ? data.snr_db : std::numeric_limits<double>::quiet_NaN();

    auto batches = [&](auto&& fn) {
        for (std::size_t first = 0; first < train_idx.size(); first += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, train_idx.size() - first);
            const std::span<const std::size_t> idx(train_idx.data() + first, count);
            fn(gather_batch(x, idx), gather_batch(y, idx));
        }
    };

    {
        double sum = 0.0;
        const ForwardOptions probe{.update_running_stats = false};
        batches([&](const Tensor4& xb, const Tensor4& yb) {
            const ForwardResult r = cdrn_forward(xb, model, Mode::Train, probe);
            sum += loss_mse(r.output, yb) * static_cast<double>(xb.batch);
        });
        result.initial_train_loss = sum / static_cast<double>(train_idx.size());
    }

    Adam adam(parameter_spans(model), cfg);
    CdrnModel best = model;
    double best_score = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        SeededRng shuffle_rng(cfg.seed, derive_stream({stream_tag::shuffle, epoch}));
        shuffle(train_idx, shuffle_rng);
        double sum = 0.0;
        batches([&](const Tensor4& xb, const Tensor4& yb) {
            LossAndGradient lg = backward(model, xb, yb);
            sum += lg.loss * static_cast<double>(xb.batch);
            adam.step(parameter_spans(model), gradient_spans(lg.gradient));
        });
        EpochRecord rec;
        rec.train_loss = sum / static_cast<double>(train_idx.size());
        rec.validation_loss = n_val > 0 ? loss_sum(model, x_val, y_val) / static_cast<double>(n_val) : rec.train_loss;
        result.history.push_back(rec);
        if (rec.validation_loss < best_score) {
            best_score = rec.validation_loss;
            best = model;
            result.best_epoch = epoch;
        }
    }
    result.model = std::move(best);
    quantize_to_float(result.model);
    return result;
}

}  // namespace irschest
