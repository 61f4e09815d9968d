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
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "irschest/cdrn.hpp"
#include "irschest/dataset.hpp"
#include "irschest/errors.hpp"
#include "irschest/estimators.hpp"
#include "test_util.hpp"

using namespace irschest;
using namespace irschest::testing;

namespace {

Tensor4 random_tensor(std::size_t b, std::size_t h, std::size_t w, std::size_t c, SeededRng& rng) {
    Tensor4 t(b, h, w, c);
    for (double& x : t.data) x = rng.normal();
    return t;
}

// Six nested loops, cross-correlation with zero padding.
Tensor4 naive_conv(const Tensor4& x, const ConvLayer& L) {
    Tensor4 y(x.batch, x.height, x.width, L.out_channels);
    const int k = static_cast<int>(L.kernel), pad = k / 2;
    for (std::size_t b = 0; b < x.batch; ++b)
        for (std::size_t h = 0; h < x.height; ++h)
            for (std::size_t w = 0; w < x.width; ++w)
                for (std::size_t o = 0; o < L.out_channels; ++o) {
                    double s = 0;
                    for (int r = 0; r < k; ++r)
                        for (int c = 0; c < k; ++c)
                            for (std::size_t i = 0; i < x.channels; ++i) {
                                const int hh = int(h) + r - pad, ww = int(w) + c - pad;
                                if (hh < 0 || ww < 0 || hh >= int(x.height) || ww >= int(x.width)) continue;
                                s += L.weights[((o * L.kernel + r) * L.kernel + c) * L.in_channels + i] *
                                     x(b, hh, ww, i);
                            }
                    y(b, h, w, o) = s;
                }
    return y;
}

ConvLayer make_layer(std::size_t out, std::size_t in, bool bn) {
    ConvLayer L;
    L.out_channels = out;
    L.in_channels = in;
    L.kernel = 3;
    L.weights.assign(out * 9 * in, 0.0);
    L.has_bn = bn;
    if (bn) L.bn = {std::vector<double>(out, 1.0), std::vector<double>(out, 0.0), std::vector<double>(out, 0.0),
                    std::vector<double>(out, 1.0)};
    return L;
}

double max_diff(const Tensor4& a, const Tensor4& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data[i] - b.data[i]));
    return d;
}

CdrnModel tiny_model(std::uint64_t seed, std::size_t blocks = 1, std::size_t layers = 2, std::size_t filters = 4,
                     std::size_t H = 4, std::size_t W = 5) {
    SeededRng rng(seed, 0);
    return make_model({blocks, layers, filters, 3, 2}, H, W, rng);
}

double train_loss(CdrnModel& m, const Tensor4& x, const Tensor4& y) {
    const ForwardOptions probe{.update_running_stats = false};
    return loss_mse(cdrn_forward(x, m, Mode::Train, probe).output, y);
}

TrainingSet small_set(std::size_t count, std::uint64_t seed) {
    SystemConfig cfg;
    cfg.N = 4;
    cfg.C = 5;
    return generate_dataset(cfg, 10.0, count, seed);
}

}  // namespace

TEST_SUITE("cdrn") {
    TEST_CASE("real/complex mapping") {
        const CMatrix real{{1.0, 2.0}, {3.0, -4.0}};
        const Tensor4 t = to_real_input(real);
        CHECK(t.batch == 1);
        CHECK(t.channels == 2);
        for (std::size_t h = 0; h < 2; ++h)
            for (std::size_t w = 0; w < 2; ++w) CHECK(t(0, h, w, 1) == 0.0);
        const Tensor4 j = to_real_input(CMatrix{{cplx(0, 1)}});
        CHECK(j(0, 0, 0, 0) == 0.0);
        CHECK(j(0, 0, 0, 1) == 1.0);
        CHECK(from_real_output(j) == CMatrix{{cplx(0, 1)}});
        SeededRng rng(1, 0);
        const CMatrix x = random_matrix(4, 9, rng);
        CHECK(from_real_output(to_real_input(x)) == x);
        CHECK_THROWS_AS(from_real_output(Tensor4(1, 2, 2, 3)), ShapeError);
    }

    TEST_CASE("conv2d examples") {
        SeededRng rng(2, 0);
        const Tensor4 x = random_tensor(2, 4, 5, 2, rng);
        ConvLayer delta = make_layer(1, 2, false);
        delta.w(0, 1, 1, 0) = 1.0;
        delta.w(0, 1, 1, 1) = 1.0;
        const Tensor4 y = conv2d(x, delta);
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t h = 0; h < 4; ++h)
                for (std::size_t w = 0; w < 5; ++w) CHECK(y(b, h, w, 0) == x(b, h, w, 0) + x(b, h, w, 1));

        ConvLayer rnd = make_layer(3, 2, false);
        for (double& v : rnd.weights) v = rng.normal();
        const Tensor4 zero(1, 4, 5, 2);
        for (double v : conv2d(zero, rnd).data) CHECK(v == 0.0);

        const Tensor4 x1 = random_tensor(1, 4, 5, 2, rng);
        CHECK(max_diff(conv2d(x1, rnd), naive_conv(x1, rnd)) < 1e-12);
        CHECK(max_diff(conv2d(x, rnd), naive_conv(x, rnd)) < 1e-12);

        CHECK_THROWS_AS(conv2d(random_tensor(1, 4, 5, 3, rng), rnd), ShapeError);
    }

    TEST_CASE("batchnorm examples") {
        // one channel, values with zero mean and unit (biased) variance
        Tensor4 x(1, 1, 4, 1);
        x.data = {-1.0, 1.0, -1.0, 1.0};
        BatchNormParams p{{1.0}, {0.0}, {0.0}, {1.0}};
        const Tensor4 y = batchnorm(x, p, Mode::Train);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(y.data[i] - x.data[i]) < 1e-3);
        // momentum 0.9, unbiased variance 4/3
        CHECK(p.running_mean[0] == doctest::Approx(0.0));
        CHECK(p.running_var[0] == doctest::Approx(0.9 + 0.1 * 4.0 / 3.0));

        BatchNormParams z{{0.0}, {0.7}, {0.0}, {1.0}};
        for (double v : batchnorm(x, z, Mode::Train).data) CHECK(v == doctest::Approx(0.7));

        SeededRng rng(3, 0);
        const Tensor4 r = random_tensor(3, 2, 2, 2, rng);
        const BatchNormParams s{{1.5, -0.5}, {0.1, 0.2}, {0.3, -0.4}, {2.0, 0.5}};
        const Tensor4 out = batchnorm(r, s);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::size_t c = i % 2;
            const double expect = (r.data[i] - s.running_mean[c]) / std::sqrt(s.running_var[c] + 1e-5) * s.scale[c] +
                                  s.shift[c];
            CHECK(out.data[i] == doctest::Approx(expect).epsilon(1e-14));
        }

        Tensor4 constant(2, 1, 1, 1);
        constant.data = {3.0, 3.0};
        BatchNormParams q{{1.0}, {0.0}, {0.0}, {1.0}};
        for (double v : batchnorm(constant, q, Mode::Train).data) CHECK(v == 0.0);
    }

    TEST_CASE("denoising block examples") {
        SeededRng rng(4, 0);
        CdrnModel m = tiny_model(4, 1, 3, 4);
        zero_residual_outputs(m);
        const Tensor4 a = random_tensor(2, 4, 5, 2, rng);
        const BlockOutput z = denoising_block_forward(a, m.blocks[0], Mode::Train);
        for (double v : z.residual.data) CHECK(v == 0.0);
        CHECK(z.next == a);

        CdrnModel r = tiny_model(5, 1, 3, 4);
        const BlockOutput o = denoising_block_forward(a, r.blocks[0], Mode::Train);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(o.next.data[i] + o.residual.data[i] == doctest::Approx(a.data[i]));
        CHECK_THROWS_AS(denoising_block_forward(random_tensor(1, 4, 5, 3, rng), r.blocks[0], Mode::Train), ShapeError);
    }

    TEST_CASE("hand-computed block on a 1x2x2x2 input") {
        DenoisingBlock block;
        block.layers.push_back(make_layer(1, 2, true));
        block.layers.push_back(make_layer(2, 1, false));
        block.layers[0].w(0, 1, 1, 0) = 1.0;  // pass channel 0 through
        block.layers[1].w(0, 1, 1, 0) = 1.0;
        block.layers[1].w(1, 1, 1, 0) = 0.5;
        Tensor4 a(1, 2, 2, 2);
        a.data = {1, 5, 2, 6, 3, 7, 4, 8};  // channel 0 = 1,2,3,4; channel 1 = 5,6,7,8
        const BlockOutput o = denoising_block_forward(a, block, Mode::Train);
        // BN over {1,2,3,4}: mean 2.5, variance 1.25; ReLU keeps the two positive entries
        const double s = std::sqrt(1.25 + 1e-5);
        const double z[4] = {0.0, 0.0, 0.5 / s, 1.5 / s};
        for (std::size_t p = 0; p < 4; ++p) {
            CHECK(o.residual.data[2 * p] == doctest::Approx(z[p]).epsilon(1e-14));
            CHECK(o.residual.data[2 * p + 1] == doctest::Approx(0.5 * z[p]).epsilon(1e-14));
            CHECK(o.next.data[2 * p] == doctest::Approx(a.data[2 * p] - z[p]).epsilon(1e-14));
            CHECK(o.next.data[2 * p + 1] == doctest::Approx(a.data[2 * p + 1] - 0.5 * z[p]).epsilon(1e-14));
        }
        CHECK(block.layers[0].bn.running_mean[0] == doctest::Approx(0.25));
    }

    TEST_CASE("cdrn_forward examples and telescoping") {
        SeededRng rng(6, 0);
        const Tensor4 a = random_tensor(3, 4, 5, 2, rng);
        CdrnModel one = tiny_model(7, 1, 3, 4);
        CdrnModel one_copy = one;
        const ForwardResult fr = cdrn_forward(a, one, Mode::Train);
        const BlockOutput bo = denoising_block_forward(a, one_copy.blocks[0], Mode::Train);
        CHECK(fr.output == bo.next);

        CdrnModel zeroed = tiny_model(8, 3, 3, 4);
        zero_residual_outputs(zeroed);
        CHECK(cdrn_forward(a, zeroed, Mode::Train).output == a);
        CHECK(cdrn_forward(a, static_cast<const CdrnModel&>(zeroed)).output == a);

        CdrnModel deep = tiny_model(9, 3, 4, 4);
        for (Mode mode : {Mode::Train, Mode::Infer}) {
            const ForwardResult r = cdrn_forward(a, deep, mode);
            REQUIRE(r.stages.size() == 4);
            REQUIRE(r.residuals.size() == 3);
            CHECK(r.stages.front() == a);
            for (std::size_t i = 0; i < a.size(); ++i) {
                double s = a.data[i];
                for (const Tensor4& res : r.residuals) s -= res.data[i];
                CHECK(r.output.data[i] == doctest::Approx(s).epsilon(1e-14));
            }
        }
    }

    TEST_CASE("property: output shape equals input shape") {
        SeededRng rng(10, 0);
        for (std::size_t H : {1u, 2u, 4u, 8u})
            for (std::size_t W : {1u, 3u, 9u, 17u}) {
                SeededRng mr(H * 100 + W, 0);
                CdrnModel m = make_model({2, 3, 3, 3, 2}, H, W, mr);
                const Tensor4 a = random_tensor(2, H, W, 2, rng);
                CHECK(cdrn_forward(a, m, Mode::Train).output.same_shape(a));
                CHECK(cdrn_forward(a, static_cast<const CdrnModel&>(m)).output.same_shape(a));
            }
    }

    TEST_CASE("model parameter shapes match the layer table") {
        SeededRng rng(11, 0);
        const CdrnModel m = make_model({}, 4, 9, rng);
        REQUIRE(m.blocks.size() == 3);
        for (const auto& block : m.blocks) {
            REQUIRE(block.layers.size() == 4);
            CHECK(block.layers[0].weights.size() == 64u * 3 * 3 * 2);
            CHECK(block.layers[1].weights.size() == 64u * 3 * 3 * 64);
            CHECK(block.layers[2].weights.size() == 64u * 3 * 3 * 64);
            CHECK(block.layers[3].weights.size() == 2u * 3 * 3 * 64);
            CHECK(block.layers[0].has_bn);
            CHECK_FALSE(block.layers[3].has_bn);
        }
        // He initialization: variance 2 / fan_in
        const auto& w = m.blocks[0].layers[1].weights;
        double s = 0;
        for (double v : w) s += v * v;
        CHECK(s / double(w.size()) == doctest::Approx(2.0 / 576.0).epsilon(0.05));
        CHECK_THROWS_AS(CdrnConfig({0, 4, 64, 3, 2}).validate(), ConfigError);
        CHECK_THROWS_AS(CdrnConfig({3, 1, 64, 3, 2}).validate(), ConfigError);
        CHECK_THROWS_AS(CdrnConfig({3, 4, 0, 3, 2}).validate(), ConfigError);
    }

    TEST_CASE("loss_mse examples") {
        SeededRng rng(12, 0);
        const Tensor4 a = random_tensor(3, 2, 3, 2, rng), b = random_tensor(3, 2, 3, 2, rng);
        CHECK(loss_mse(a, a) == 0.0);
        Tensor4 p(1, 1, 1, 2), q(1, 1, 1, 2);
        p.data = {3.0, 1.0};
        q.data = {1.0, 1.0};
        CHECK(loss_mse(p, q) == doctest::Approx(2.0));
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        CHECK(loss_mse(a, b) == doctest::Approx(s / 6.0).epsilon(1e-14));
        CHECK_THROWS_AS(loss_mse(a, Tensor4(2, 2, 3, 2)), ShapeError);
    }

    TEST_CASE("backward: zero loss gives zero gradients") {
        SeededRng rng(13, 0);
        CdrnModel m = tiny_model(14);
        zero_residual_outputs(m);
        const Tensor4 a = random_tensor(2, 4, 5, 2, rng);
        LossAndGradient lg = backward(m, a, a);
        CHECK(lg.loss == 0.0);
        for (auto span : gradient_spans(lg.gradient))
            for (double g : span) CHECK(g == 0.0);
    }

    TEST_CASE("backward matches central finite differences on every parameter") {
        SeededRng rng(15, 0);
        CdrnModel m = tiny_model(16, 1, 2, 4, 4, 5);
        for (auto& L : m.blocks[0].layers)
            if (L.has_bn)
                for (std::size_t c = 0; c < L.out_channels; ++c) {
                    L.bn.scale[c] = 0.5 + rng.uniform();
                    L.bn.shift[c] = 0.3 * rng.normal();
                }
        const Tensor4 x = random_tensor(3, 4, 5, 2, rng), y = random_tensor(3, 4, 5, 2, rng);
        const ForwardOptions no_update{.update_running_stats = false};
        LossAndGradient lg = backward(m, x, y, no_update);
        auto params = parameter_spans(m);
        auto grads = gradient_spans(lg.gradient);
        REQUIRE(params.size() == grads.size());
        const double h = 1e-4;
        double worst = 0;
        std::size_t checked = 0;
        for (std::size_t s = 0; s < params.size(); ++s)
            for (std::size_t i = 0; i < params[s].size(); ++i) {
                const double keep = params[s][i];
                params[s][i] = keep + h;
                const double lp = train_loss(m, x, y);
                params[s][i] = keep - h;
                const double lm = train_loss(m, x, y);
                params[s][i] = keep;
                const double fd = (lp - lm) / (2 * h);
                const double rel = std::abs(fd - grads[s][i]) / std::max({std::abs(fd), std::abs(grads[s][i]), 1e-6});
                worst = std::max(worst, rel);
                ++checked;
            }
        CHECK(checked == 4 * 18 + 4 + 4 + 2 * 36);
        CHECK(worst < 1e-4);
    }

    TEST_CASE("final-layer gradient equals the transposed convolution of the output error") {
        SeededRng rng(17, 0);
        CdrnModel m = tiny_model(18, 1, 2, 3, 3, 4);
        const Tensor4 x = random_tensor(2, 3, 4, 2, rng), y = random_tensor(2, 3, 4, 2, rng);
        const ForwardOptions no_update{.update_running_stats = false};
        // intermediate activation z feeding the final layer
        ConvLayer& first = m.blocks[0].layers[0];
        BatchNormParams bn = first.bn;
        Tensor4 z = batchnorm(conv2d(x, first), bn, Mode::Train, false);
        for (double& v : z.data) v = std::max(v, 0.0);
        const Tensor4 out = cdrn_forward(x, m, Mode::Train, no_update).output;
        LossAndGradient lg = backward(m, x, y, no_update);
        const ConvLayer& last = m.blocks[0].layers[1];
        const auto& g = lg.gradient.blocks[0][1].weights;
        for (std::size_t o = 0; o < 2; ++o)
            for (std::size_t r = 0; r < 3; ++r)
                for (std::size_t c = 0; c < 3; ++c)
                    for (std::size_t i = 0; i < last.in_channels; ++i) {
                        double s = 0;
                        for (std::size_t b = 0; b < 2; ++b)
                            for (std::size_t hh = 0; hh < 3; ++hh)
                                for (std::size_t ww = 0; ww < 4; ++ww) {
                                    const int sh = int(hh + r) - 1, sw = int(ww + c) - 1;
                                    if (sh < 0 || sw < 0 || sh >= 3 || sw >= 4) continue;
                                    // output = x - residual, so dJ/dresidual = -(out - y) / batch
                                    s += -(out(b, hh, ww, o) - y(b, hh, ww, o)) / 2.0 * z(b, sh, sw, i);
                                }
                        CHECK(g[((o * 3 + r) * 3 + c) * last.in_channels + i] == doctest::Approx(s).epsilon(1e-12));
                    }
    }

    TEST_CASE("linear mode reproduces the linear residual estimate") {
        // Column-only complex taps make each conv a right-multiplication by a tridiagonal Toeplitz matrix.
        const std::size_t M = 4, W = 9, D = 3, NL = 3;
        SeededRng rng(19, 0);
        CdrnModel m = make_model({D, NL, 3, 3, 2}, M, W, rng);
        std::vector<CMatrix> Wd;
        for (auto& block : m.blocks) {
            CMatrix prod = CMatrix::identity(W);
            for (auto& L : block.layers) {
                std::fill(L.weights.begin(), L.weights.end(), 0.0);
                CMatrix T(W, W);
                for (int delta = -1; delta <= 1; ++delta) {
                    const cplx t(0.3 * rng.normal(), 0.3 * rng.normal());
                    const std::size_t col = std::size_t(delta + 1);
                    L.w(0, 1, col, 0) = t.real();
                    L.w(0, 1, col, 1) = -t.imag();
                    L.w(1, 1, col, 0) = t.imag();
                    L.w(1, 1, col, 1) = t.real();
                    for (std::size_t w = 0; w < W; ++w) {
                        const int j = int(w) + delta;
                        if (j >= 0 && j < int(W)) T(std::size_t(j), w) = t;
                    }
                }
                prod = matmul(prod, T);
            }
            Wd.push_back(prod);
        }
        CMatrix total(W, W), carry = CMatrix::identity(W);
        for (const CMatrix& w : Wd) {
            total += matmul(carry, w);
            carry = matmul(carry, CMatrix::identity(W) - w);
        }
        const CMatrix h_ls = random_matrix(M, W, rng);
        const ForwardOptions lin{.update_running_stats = false, .linear = true};
        const CMatrix out = from_real_output(cdrn_forward(to_real_input(h_ls), m, Mode::Train, lin).output);
        CHECK(frob_diff(out, linear_residual_estimate(h_ls, total)) < 1e-8);
    }

    TEST_CASE("train: zero learning rate leaves parameters unchanged") {
        const TrainingSet set = small_set(1, 20);
        TrainConfig tc;
        tc.learning_rate = 0.0;
        tc.epochs = 1;
        const CdrnConfig net{1, 2, 4, 3, 2};
        const TrainResult r = train(set, net, tc);
        SeededRng init(tc.seed, derive_stream({stream_tag::init}));
        CdrnModel expect = make_model(net, set.inputs.height, set.inputs.width, init);
        quantize_to_float(expect);
        CdrnModel got = r.model;
        auto a = parameter_spans(got), b = parameter_spans(expect);
        for (std::size_t s = 0; s < a.size(); ++s)
            for (std::size_t i = 0; i < a[s].size(); ++i) CHECK(a[s][i] == b[s][i]);
        TrainingSet empty;
        CHECK_THROWS_AS(train(empty, net, tc), DomainError);
    }

    TEST_CASE("train: loss decreases and runs are reproducible") {
        const TrainingSet set = small_set(400, 21);
        TrainConfig tc;
        tc.epochs = 6;
        tc.batch_size = 32;
        const CdrnConfig net{2, 3, 8, 3, 2};
        const TrainResult a = train(set, net, tc), b = train(set, net, tc);
        CHECK(a.history.size() == 6);
        CHECK(a.history.back().train_loss < a.initial_train_loss);
        CHECK(serialize_model(a.model) == serialize_model(b.model));
        for (std::size_t e = 0; e < a.history.size(); ++e) {
            CHECK(a.history[e].train_loss == b.history[e].train_loss);
            CHECK(a.history[e].validation_loss == b.history[e].validation_loss);
        }
        CHECK(a.model.input_scale > 0.0);
        CHECK(a.model.trained_snr_db == 10.0);
        TrainConfig bad = tc;
        bad.validation_fraction = 1.0;
        CHECK_THROWS_AS(train(set, net, bad), ConfigError);
    }

    TEST_CASE("cdrn_estimate with zeroed residuals is the identity for any input scale") {
        SeededRng rng(22, 0);
        CdrnModel m = tiny_model(23, 2, 3, 4, 4, 9);
        zero_residual_outputs(m);
        const CMatrix x = random_matrix(4, 9, rng);
        for (double s : {1.0, 1e-3, 37.5}) {
            m.input_scale = s;
            CHECK(max_abs_diff(cdrn_estimate(m, x), x) < 1e-12 * std::sqrt(frobenius_norm_sq(x)));
        }
        CHECK_THROWS_AS(cdrn_estimate(m, random_matrix(4, 8, rng)), ShapeError);
    }

    TEST_CASE("cdrn_infer is chunk invariant") {
        SeededRng rng(24, 0);
        const CdrnModel m = tiny_model(25, 2, 3, 4, 4, 9);
        const Tensor4 x = random_tensor(37, 4, 9, 2, rng);
        CHECK(max_diff(cdrn_infer(m, x, 5), cdrn_infer(m, x, 256)) < 1e-12);
        CHECK(max_diff(cdrn_infer(m, x, 256), cdrn_forward(x, m).output) < 1e-12);
    }

    TEST_CASE("model persistence") {
        CdrnModel m = tiny_model(26, 2, 3, 4, 4, 9);
        m.input_scale = 12.5;
        m.trained_snr_db = 5.0;
        const auto bytes = serialize_model(m);
        const CdrnModel back = deserialize_model(bytes);
        CHECK(serialize_model(back) == bytes);
        CHECK(back.config == m.config);
        CHECK(back.input_scale == 12.5);
        CHECK(back.trained_snr_db == 5.0);

        SeededRng rng(27, 0);
        const CMatrix x = random_matrix(4, 9, rng);
        const CMatrix before = cdrn_estimate(m, x), after = cdrn_estimate(back, x);
        CHECK(max_abs_diff(before, after) < 1e-6);

        const auto path = std::filesystem::temp_directory_path() / "irschest_model_test.cdrn";
        save_model(back, path);
        CHECK(serialize_model(load_model(path)) == bytes);
        std::filesystem::remove(path);

        for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), bytes.size() / 2, bytes.size() - 1})
            CHECK_THROWS_AS(deserialize_model(std::span(bytes).first(cut)), FormatError);
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(deserialize_model(bad), FormatError);
        bad = bytes;
        bad[4] = 2;
        try {
            (void)deserialize_model(bad);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 4);
        }
        bad = bytes;
        bad.push_back(0);
        CHECK_THROWS_AS(deserialize_model(bad), FormatError);
        CHECK_THROWS_AS(load_model("/nonexistent/model.cdrn"), Error);
    }

    TEST_CASE("NaN trained SNR round-trips") {
        const CdrnModel m = tiny_model(28);
        CHECK(std::isnan(deserialize_model(serialize_model(m)).trained_snr_db));
    }
}
