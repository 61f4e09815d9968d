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

// Acceptance runner: one PASS/FAIL line per criterion. Every criterion writes its measurements
// to a CSV under <out>/run1; the determinism check re-runs them all into <out>/run2 and
// compares every file byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "irschest/cdrn.hpp"
#include "irschest/channel_model.hpp"
#include "irschest/dataset.hpp"
#include "irschest/estimators.hpp"
#include "irschest/pilot_protocol.hpp"
#include "irschest/sweep.hpp"
#include "irschest/visualize.hpp"
#include "test_util.hpp"

using namespace irschest;
using namespace irschest::testing;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    int id;
    bool pass;
    std::string detail;
};

class MetricSheet {
public:
    void add(const std::string& key, double value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        lines_ << key << ',' << buf << '\n';
    }
    void save(const fs::path& p) const {
        std::ofstream out(p, std::ios::binary);
        out << "metric,value\n" << lines_.str();
    }

private:
    std::ostringstream lines_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void save_rows(const fs::path& p, const std::vector<ResultRow>& rows) {
    std::ofstream out(p, std::ios::binary);
    write_csv(out, rows);
}

const ResultRow& row(const std::vector<ResultRow>& rows, double value, const std::string& est) {
    for (const auto& r : rows)
        if (r.value == value && r.estimator == est) return r;
    throw std::runtime_error("missing row " + est);
}

SweepSpec base_spec(SweepVariable v, std::vector<double> values, std::vector<EstimatorKind> est) {
    SweepSpec s;
    s.variable = v;
    s.values = std::move(values);
    s.estimators = std::move(est);
    s.trials = 10000;
    s.seed = kSeed;
    return s;
}

// Path loss 1 on every link: the prior carries as much energy as the 0 dB noise floor.
SystemConfig unit_gain_rayleigh() {
    SystemConfig c;
    c.ref_loss = 1.0;
    c.ref_dist = 10.0;
    c.dist_ub = c.dist_ib = c.dist_ui = 10.0;
    c.rice_ub = c.rice_ib = c.rice_ui = 0.0;
    return c;
}

struct Context {
    fs::path dir;
    std::map<double, CdrnModel> models;
};

Outcome criterion1(Context& ctx) {
    MetricSheet sheet;
    double worst = 0;
    for (auto [N, C] : std::vector<std::pair<std::size_t, std::size_t>>{{8, 9}, {16, 17}, {32, 33}, {8, 16}}) {
        const CMatrix P = build_dft_patterns(N, C);
        CMatrix g = matmul_nh(P, P);
        for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= double(C);
        const double err = std::sqrt(frobenius_norm_sq(g));
        sheet.add("defect_N" + std::to_string(N) + "_C" + std::to_string(C), err);
        worst = std::max(worst, err);
    }
    sheet.save(ctx.dir / "c01_dft_unitarity.csv");
    return {1, worst < 1e-9, fmt("DFT book unitarity, worst ||PP^H - CI||_F = %.3g (< 1e-9)", worst)};
}

Outcome criterion2(Context& ctx) {
    const SystemConfig cfg;
    const double sigma = 0.1;
    const std::size_t trials = 100000;
    MetricSheet sheet;
    bool ok = true;
    std::string detail = "LS error vs M sigma^2 tr[(PP^H)^-1]:";
    for (const PilotBook& book : {make_dft_book(cfg), make_binary_book(cfg)}) {
        const std::string name = book.kind == PatternKind::Dft ? "dft" : "binary";
        const CMatrix inv = solve_hermitian(matmul_nh(book.P, book.P), CMatrix::identity(cfg.N + 1));
        const double oracle = double(cfg.M) * sigma * trace(inv).real();
        double acc = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            SeededRng rng(kSeed, derive_stream({stream_tag::trial, 2, t}));
            const ChannelRealization ch = sample_channels(cfg, rng);
            const CMatrix& H = ch.H[t % cfg.K];
            const UserObservation obs = direct_observation(H, book.P, sigma, rng);
            acc += frobenius_norm_sq(ls_estimate(obs.X, book) - H);
        }
        const double mc = acc / double(trials);
        const double rel = std::abs(mc / oracle - 1.0);
        sheet.add(name + "_monte_carlo", mc);
        sheet.add(name + "_oracle", oracle);
        ok = ok && rel < 0.02;
        detail += " " + name + fmt(" MC %.5g vs %.5g (%.2f%%);", mc, oracle, 100 * rel);
    }
    sheet.save(ctx.dir / "c02_ls_analytic.csv");
    return {2, ok, detail + " tol 2%"};
}

Outcome criterion3(Context& ctx) {
    MetricSheet sheet;
    double worst = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        SeededRng rng(kSeed, derive_stream({stream_tag::trial, 3, i}));
        const std::size_t N = i % 2 ? 8 : 4, C = i % 3 ? N + 1 : 2 * (N + 1), M = 1 + i % 4;
        const CMatrix P = build_dft_patterns(N, C);
        const LmmseContext lc{random_pd(N + 1, rng), M, 0.05 + 2.0 * rng.uniform(), C};
        const CMatrix X = random_matrix(M, C, rng);
        const double d = frob_diff(lmmse_estimate(X, P, lc), lmmse_estimate_dft(X, P, lc));
        worst = std::max(worst, d);
    }
    sheet.add("worst_frobenius_gap", worst);
    sheet.save(ctx.dir / "c03_lmmse_forms.csv");
    return {3, worst < 1e-8, fmt("LMMSE general vs DFT form, worst gap %.3g (< 1e-8, 100 instances)", worst)};
}

double linear_mode_bridge_gap(SeededRng& rng) {
    const std::size_t M = 4, W = 9, D = 3, NL = 3;
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
    const CMatrix expect = matmul(h_ls, CMatrix::identity(W) - total);
    const ForwardOptions lin{.update_running_stats = false, .linear = true};
    const CMatrix out = from_real_output(cdrn_forward(to_real_input(h_ls), m, Mode::Train, lin).output);
    return frob_diff(out, expect);
}

Outcome criterion4(Context& ctx) {
    MetricSheet sheet;
    double worst_w = 0, worst_net = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        SeededRng rng(kSeed, derive_stream({stream_tag::trial, 4, i}));
        const std::size_t N = 8, C = 9, M = 4;
        const CMatrix P = build_dft_patterns(N, C);
        const LmmseContext lc{random_pd(N + 1, rng), M, 0.05 + 2.0 * rng.uniform(), C};
        const CMatrix X = random_matrix(M, C, rng);
        const CMatrix h_ls = ls_estimate_dft(X, P);
        const CMatrix Wstar = lmmse_residual_weights(lc.R_H, M, lc.sigma_z_sq, C);
        worst_w = std::max(worst_w, frob_diff(linear_residual_estimate(h_ls, Wstar), lmmse_estimate(X, P, lc)));
    }
    for (std::size_t i = 0; i < 20; ++i) {
        SeededRng rng(kSeed, derive_stream({stream_tag::trial, 40, i}));
        worst_net = std::max(worst_net, linear_mode_bridge_gap(rng));
    }
    sheet.add("worst_weight_gap", worst_w);
    sheet.add("worst_linear_network_gap", worst_net);
    sheet.save(ctx.dir / "c04_residual_bridge.csv");
    return {4, worst_w < 1e-8 && worst_net < 1e-8,
            fmt("residual bridge: W* vs LMMSE gap %.3g, linear-mode CDRN gap %.3g (< 1e-8)", worst_w, worst_net)};
}

Outcome criterion5(Context& ctx) {
    SweepSpec spec = base_spec(SweepVariable::SnrDb, {0, 5, 10},
                               {EstimatorKind::LS, EstimatorKind::ELMMSE, EstimatorKind::MMSE_GAUSSIAN});
    spec.base = unit_gain_rayleigh();
    const auto rows = run_sweep(spec);
    save_rows(ctx.dir / "c05_gaussian_prior.csv", rows);
    bool ok = true;
    std::string detail = "Rayleigh prior:";
    for (double snr : spec.values) {
        const auto &ls = row(rows, snr, "LS"), &mm = row(rows, snr, "MMSE_GAUSSIAN"), &el = row(rows, snr, "ELMMSE");
        const double se = std::max(mm.nmse_stderr, el.nmse_stderr);
        const bool beat = mm.nmse_linear < ls.nmse_linear && el.nmse_linear < ls.nmse_linear;
        const bool same = std::abs(mm.nmse_linear - el.nmse_linear) <= se;
        ok = ok && beat && same;
        detail += fmt(" %g dB LS %.4g / LMMSE %.4g", snr, ls.nmse_linear, mm.nmse_linear) +
                  fmt(" gap %.2g <= SE %.2g;", std::abs(mm.nmse_linear - el.nmse_linear), se);
    }
    return {5, ok, detail};
}

Outcome criterion6(Context& ctx) {
    SeededRng rng(kSeed, derive_stream({stream_tag::trial, 6}));
    CdrnModel m = make_model({1, 2, 4, 3, 2}, 4, 5, rng);
    for (auto& L : m.blocks[0].layers)
        if (L.has_bn)
            for (std::size_t c = 0; c < L.out_channels; ++c) {
                L.bn.scale[c] = 0.5 + rng.uniform();
                L.bn.shift[c] = 0.3 * rng.normal();
            }
    Tensor4 x(3, 4, 5, 2), y(3, 4, 5, 2);
    for (double& v : x.data) v = rng.normal();
    for (double& v : y.data) v = rng.normal();
    const ForwardOptions probe{.update_running_stats = false};
    LossAndGradient lg = backward(m, x, y, probe);
    auto params = parameter_spans(m);
    auto grads = gradient_spans(lg.gradient);
    const double h = 1e-4;
    double worst = 0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < params.size(); ++s)
        for (std::size_t i = 0; i < params[s].size(); ++i) {
            const double keep = params[s][i];
            params[s][i] = keep + h;
            const double lp = loss_mse(cdrn_forward(x, m, Mode::Train, probe).output, y);
            params[s][i] = keep - h;
            const double lm = loss_mse(cdrn_forward(x, m, Mode::Train, probe).output, y);
            params[s][i] = keep;
            const double fd = (lp - lm) / (2 * h);
            worst = std::max(worst, std::abs(fd - grads[s][i]) / std::max({std::abs(fd), std::abs(grads[s][i]), 1e-6}));
            ++count;
        }
    MetricSheet sheet;
    sheet.add("parameters", double(count));
    sheet.add("worst_relative_error", worst);
    sheet.save(ctx.dir / "c06_gradient.csv");
    return {6, worst < 1e-4 && count > 0,
            fmt("finite-difference check on %g parameters, worst relative error %.3g (< 1e-4)", double(count), worst)};
}

Outcome criterion7(Context& ctx) {
    const SystemConfig cfg;
    const CdrnConfig net;
    const TrainConfig tc;
    MetricSheet sheet;
    ctx.models.clear();
    for (double snr : {5.0, 10.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const TrainingSet data = generate_dataset(cfg, snr, 10000, kSeed + std::uint64_t(snr));
        const TrainResult tr = train(data, net, tc);
        const std::string tag = fmt("%g", snr);
        save_dataset(data, ctx.dir / ("c07_data_" + tag + "dB.ceds"));
        save_model(tr.model, ctx.dir / ("c07_model_" + tag + "dB.cdrn"));
        sheet.add("initial_loss_" + tag, tr.initial_train_loss);
        for (std::size_t e = 0; e < tr.history.size(); ++e) {
            sheet.add("train_loss_" + tag + "_" + std::to_string(e), tr.history[e].train_loss);
            sheet.add("validation_loss_" + tag + "_" + std::to_string(e), tr.history[e].validation_loss);
        }
        ctx.models.emplace(snr, load_model(ctx.dir / ("c07_model_" + tag + "dB.cdrn")));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "  trained %g dB model in %.0f s (best epoch %zu)\n", snr, secs, tr.best_epoch + 1);
    }
    sheet.save(ctx.dir / "c07_training.csv");

    SweepSpec spec = base_spec(SweepVariable::SnrDb, {5, 10}, {EstimatorKind::LS, EstimatorKind::ELMMSE,
                                                              EstimatorKind::BLMMSE, EstimatorKind::CDRN});
    spec.seed = kSeed + 7777;
    const auto rows = run_sweep(spec, ctx.models);
    save_rows(ctx.dir / "c07_cdrn_vs_ls.csv", rows);
    bool ok = true;
    std::string detail = "held-out NMSE(CDRN) <= 0.5 NMSE(LS):";
    for (double snr : spec.values) {
        const double c = row(rows, snr, "CDRN").nmse_linear, l = row(rows, snr, "LS").nmse_linear;
        ok = ok && c <= 0.5 * l;
        detail += fmt(" %g dB CDRN %.4g vs LS %.4g;", snr, c, l);
    }
    return {7, ok, detail};
}

Outcome criterion8(Context& ctx) {
    std::string detail;
    bool ok = true;

    SweepSpec snr = base_spec(SweepVariable::SnrDb, {0, 5, 10, 15, 20},
                              {EstimatorKind::LS, EstimatorKind::ELMMSE, EstimatorKind::BLMMSE});
    const auto a_rows = run_sweep(snr);
    save_rows(ctx.dir / "c08a_snr.csv", a_rows);
    bool a_ok = true;
    auto monotone = [&](const std::vector<ResultRow>& rows, const std::vector<double>& values, const std::string& e) {
        for (std::size_t i = 1; i < values.size(); ++i) {
            const auto &p = row(rows, values[i - 1], e), &q = row(rows, values[i], e);
            if (q.nmse_linear > p.nmse_linear + std::max(p.nmse_stderr, q.nmse_stderr)) return false;
        }
        return true;
    };
    for (const char* e : {"LS", "ELMMSE", "BLMMSE"}) a_ok = a_ok && monotone(a_rows, snr.values, e);
    if (!ctx.models.empty()) {
        SweepSpec again = base_spec(SweepVariable::SnrDb, {5, 10}, {EstimatorKind::CDRN});
        again.seed = kSeed + 7777;
        const auto cdrn_rows = run_sweep(again, ctx.models);
        save_rows(ctx.dir / "c08a_snr_cdrn.csv", cdrn_rows);
        a_ok = a_ok && monotone(cdrn_rows, again.values, "CDRN");
        detail += fmt("(a) CDRN %.4g -> %.4g", cdrn_rows[0].nmse_linear, cdrn_rows[1].nmse_linear);
    } else {
        a_ok = false;
        detail += "(a) no CDRN models";
    }
    detail += a_ok ? " monotone in SNR;" : " NOT monotone in SNR;";
    ok = ok && a_ok;

    SweepSpec n = base_spec(SweepVariable::NElements, {8, 16, 32}, {EstimatorKind::LS, EstimatorKind::BLMMSE});
    n.fixed_snr_db = 5.0;
    const auto b_rows = run_sweep(n);
    save_rows(ctx.dir / "c08b_n.csv", b_rows);
    double bmin = 1e300, bmax = -1e300;
    bool ls_down = true;
    for (std::size_t i = 0; i < n.values.size(); ++i) {
        const double b = row(b_rows, n.values[i], "BLMMSE").nmse_db;
        bmin = std::min(bmin, b);
        bmax = std::max(bmax, b);
        if (i > 0) ls_down = ls_down && row(b_rows, n.values[i], "LS").nmse_linear < row(b_rows, n.values[i - 1], "LS").nmse_linear;
    }
    const bool b_ok = bmax - bmin < 3.0 && ls_down;
    detail += fmt(" (b) B-LMMSE spread %.3f dB (< 3), LS ", bmax - bmin) + (ls_down ? "decreasing;" : "NOT decreasing;");
    ok = ok && b_ok;

    SweepSpec c = base_spec(SweepVariable::CPilots, {9, 18, 36}, {EstimatorKind::LS});
    const auto c_rows = run_sweep(c);
    save_rows(ctx.dir / "c08c_c.csv", c_rows);
    double worst = 0;
    for (std::size_t i = 1; i < c.values.size(); ++i) {
        const double drop = row(c_rows, c.values[i - 1], "LS").nmse_db - row(c_rows, c.values[i], "LS").nmse_db;
        worst = std::max(worst, std::abs(drop - 10.0 * std::log10(c.values[i] / c.values[i - 1])));
    }
    detail += fmt(" (c) LS slope error %.3f dB (< 1)", worst);
    ok = ok && worst < 1.0;
    return {8, ok, "trends: " + detail};
}

Outcome criterion9(Context& ctx) {
    const SystemConfig cfg;
    const PilotBook book = make_dft_book(cfg);
    const double sigma = cfg.sigma_z_sq, sigma_v = sigma * book.tx_power * double(cfg.L);
    double err_rx = 0, err_direct = 0, energy = 0;
    for (std::size_t t = 0; t < 10000; ++t) {
        SeededRng rng(kSeed, derive_stream({stream_tag::trial, 9, t}));
        const ChannelRealization ch = sample_channels(cfg, rng);
        const std::size_t k = t % cfg.K;
        SeededRng rx_rng(kSeed, derive_stream({stream_tag::trial, 90, t}));
        const UserObservation a = separate_user(synthesize_rx(ch, book, sigma_v, rx_rng), book, k);
        SeededRng d_rng(kSeed, derive_stream({stream_tag::trial, 91, t}));
        const UserObservation b = direct_observation(ch.H[k], book.P, sigma, d_rng, k);
        err_rx += frobenius_norm_sq(ls_estimate_dft(a.X, book.P) - ch.H[k]);
        err_direct += frobenius_norm_sq(ls_estimate_dft(b.X, book.P) - ch.H[k]);
        energy += frobenius_norm_sq(ch.H[k]);
    }
    const double n_rx = err_rx / energy, n_direct = err_direct / energy, rel = std::abs(n_rx / n_direct - 1.0);
    MetricSheet sheet;
    sheet.add("nmse_synthesize_rx", n_rx);
    sheet.add("nmse_direct", n_direct);
    sheet.save(ctx.dir / "c09_two_path.csv");
    return {9, rel < 0.02, fmt("LS NMSE via rx path %.5g vs direct %.5g (rel %.3f%%, < 2%%)", n_rx, n_direct, 100 * rel)};
}

Outcome criterion10(Context& ctx) {
    if (ctx.models.count(10.0) == 0) return {10, false, "no trained model"};
    const CdrnModel& model = ctx.models.at(10.0);
    const TrainingSet test = generate_dataset(SystemConfig{}, 10.0, 100, kSeed + 1010);
    std::size_t monotone = 0;
    bool in_range = true;
    std::vector<double> stage_err;
    double energy = 0;
    MetricSheet sheet;
    for (std::size_t i = 0; i < test.count(); ++i) {
        const CMatrix x = from_real_output(test.inputs, i), h = from_real_output(test.targets, i);
        const std::vector<CMatrix> st = denoising_stages(model, x);
        std::vector<GrayImage> images;
        if (i == 0) {
            images = visualize_denoising(model, x, ctx.dir / "c10_images");
        } else {
            for (const CMatrix& s : st) images.push_back(magnitude_image(s));
        }
        for (const GrayImage& g : images)
            for (double p : g.pixels) in_range = in_range && p >= 0.0 && p <= 1.0;
        bool mono = images.size() == model.blocks.size() + 1;
        double prev = INFINITY;
        for (std::size_t d = 0; d < st.size(); ++d) {
            const double cur = std::sqrt(frobenius_norm_sq(st[d] - h));
            sheet.add("sample_" + std::to_string(i) + "_stage_" + std::to_string(d), cur);
            mono = mono && cur <= prev;
            prev = cur;
            if (stage_err.size() <= d) stage_err.resize(d + 1, 0.0);
            stage_err[d] += cur * cur;
        }
        energy += frobenius_norm_sq(h);
        monotone += mono;
    }
    sheet.add("monotone_fraction", double(monotone) / double(test.count()));
    std::string stages = "; stage NMSE dB";
    for (std::size_t d = 0; d < stage_err.size(); ++d) {
        sheet.add("stage_" + std::to_string(d) + "_nmse", stage_err[d] / energy);
        stages += fmt(" %.2f", 10.0 * std::log10(stage_err[d] / energy));
    }
    sheet.save(ctx.dir / "c10_stages.csv");
    return {10, in_range && monotone >= 80,
            std::string("pixels in [0,1]: ") + (in_range ? "yes" : "no") +
                fmt("; per-block error non-increasing on %g/100 inputs (>= 80)", double(monotone)) + stages};
}

using Criterion = std::function<Outcome(Context&)>;

std::vector<Outcome> run_all(const fs::path& dir, bool verbose) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    Context ctx{dir, {}};
    const std::vector<Criterion> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                     criterion6, criterion7, criterion8, criterion9, criterion10};
    std::vector<Outcome> out;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c(ctx);
        } catch (const std::exception& e) {
            o = {int(out.size()) + 1, false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (verbose) {
            std::printf("%s criterion %d: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", o.id, o.detail.c_str(), secs);
            std::fflush(stdout);
        }
        out.push_back(o);
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> files_under(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    const auto first = run_all(root / "run1", true);
    bool all_pass = std::all_of(first.begin(), first.end(), [](const Outcome& o) { return o.pass; });

    std::fprintf(stderr, "  re-running every criterion for the determinism check\n");
    (void)run_all(root / "run2", false);
    const auto a = files_under(root / "run1"), b = files_under(root / "run2");
    std::size_t same = 0;
    std::string mismatch;
    for (const auto& f : a) {
        if (std::find(b.begin(), b.end(), f) != b.end() && slurp(root / "run1" / f) == slurp(root / "run2" / f))
            ++same;
        else if (mismatch.empty())
            mismatch = f.string();
    }
    const bool det = same == a.size() && a.size() == b.size() && !a.empty();
    std::printf("%s criterion 11: %zu/%zu CSV, model, dataset and image files byte-identical on re-run%s\n",
                det ? "PASS" : "FAIL", same, a.size(), mismatch.empty() ? "" : (", first mismatch " + mismatch).c_str());
    all_pass = all_pass && det;
    return all_pass ? 0 : 1;
}
