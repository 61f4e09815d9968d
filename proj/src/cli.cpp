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

#include "irschest/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "irschest/config.hpp"
#include "irschest/dataset.hpp"
#include "irschest/errors.hpp"
#include "irschest/estimators.hpp"
#include "irschest/pilot_protocol.hpp"
#include "irschest/sweep.hpp"
#include "irschest/visualize.hpp"

namespace irschest {

namespace {

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Error("file not found: '" + path + "'");
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        write_csv(std::cout, rows);
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);
    write_csv(out, rows);
    if (!out) throw Error("write failed for " + out_path);
}

struct GenDataArgs {
    std::string config, out;
    double snr_db = 10.0;
    std::optional<double> snr_db_max;
    std::size_t count = 10000;
    std::uint64_t seed = 1;
};

int run_gen_data(const GenDataArgs& a) {
    const AppConfig cfg = load_config(a.config);
    const TrainingSet set = a.snr_db_max ? generate_dataset_range(cfg.system, a.snr_db, *a.snr_db_max, a.count, a.seed)
                                         : generate_dataset(cfg.system, a.snr_db, a.count, a.seed);
    save_dataset(set, a.out);
    std::cerr << "wrote " << set.count() << " examples to " << a.out << "\n";
    return 0;
}

struct TrainArgs {
    std::string data, net_config, train_config, out;
    bool quiet = false;
};

int run_train(const TrainArgs& a) {
    const AppConfig net = load_config(a.net_config);
    const AppConfig tr = load_config(a.train_config);
    require_file(a.data);
    const TrainingSet set = load_dataset(a.data);
    const TrainResult result = train(set, net.net, tr.train);
    if (!a.quiet) {
        std::printf("epoch,train_loss,validation_loss\n");
        std::printf("0,%.10g,\n", result.initial_train_loss);
        for (std::size_t e = 0; e < result.history.size(); ++e)
            std::printf("%zu,%.10g,%.10g\n", e + 1, result.history[e].train_loss, result.history[e].validation_loss);
    }
    save_model(result.model, a.out);
    std::cerr << "best epoch " << result.best_epoch + 1 << ", model written to " << a.out << "\n";
    return 0;
}

struct EvalArgs {
    std::string model, config, out;
    double snr_db = 10.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
};

int run_eval(const EvalArgs& a) {
    const AppConfig cfg = load_config(a.config);
    require_file(a.model);
    ModelMap models;
    models.emplace(a.snr_db, load_model(a.model));
    SweepSpec spec = make_sweep_spec(cfg, SweepVariable::SnrDb);
    spec.values = {a.snr_db};
    spec.trials = a.trials;
    spec.seed = a.seed;
    if (std::find(spec.estimators.begin(), spec.estimators.end(), EstimatorKind::CDRN) == spec.estimators.end())
        spec.estimators.push_back(EstimatorKind::CDRN);
    emit_csv(run_sweep(spec, models), a.out);
    return 0;
}

struct SweepArgs {
    std::string config, kind, out;
};

int run_sweep_cmd(const SweepArgs& a) {
    const AppConfig cfg = load_config(a.config);
    const SweepVariable variable = parse_sweep_variable(a.kind);
    const SweepSpec spec = make_sweep_spec(cfg, variable);
    ModelMap models;
    if (std::find(spec.estimators.begin(), spec.estimators.end(), EstimatorKind::CDRN) != spec.estimators.end()) {
        const auto base = std::filesystem::path(a.config).parent_path();
        for (const auto& [value, path] : cfg.sweep.cdrn_models) {
            std::filesystem::path p(path);
            if (p.is_relative()) p = base / p;
            require_file(p.string());
            models.emplace(value, load_model(p));
        }
    }
    emit_csv(run_sweep(spec, models), a.out);
    return 0;
}

struct VisualizeArgs {
    std::string model, config, out_dir;
    std::uint64_t seed = 1;
    std::optional<double> snr_db;
};

int run_visualize(const VisualizeArgs& a) {
    AppConfig cfg = load_config(a.config);
    require_file(a.model);
    const CdrnModel model = load_model(a.model);
    SystemConfig& sys = cfg.system;
    if (model.height != sys.M || model.width != sys.N + 1)
        throw ConfigError("model input shape does not match system.M / system.N");
    if (a.snr_db)
        sys.sigma_z_sq = noise_variance_for_snr(*a.snr_db, sys.tx_power);
    else if (std::isfinite(model.trained_snr_db))
        sys.sigma_z_sq = noise_variance_for_snr(model.trained_snr_db, sys.tx_power);

    SeededRng rng(a.seed, derive_stream({stream_tag::visualize}));
    const ChannelRealization chan = sample_channels(sys, rng);
    const CMatrix& H = chan.H[0];
    const PilotBook book = make_dft_book(sys);
    const CMatrix x_ls = ls_estimate_dft(direct_observation(H, book.P, sys.sigma_z_sq, rng).X, book.P);

    const auto stages = denoising_stages(model, x_ls);
    visualize_denoising(model, x_ls, a.out_dir);
    std::printf("stage,nmse_db\n");
    for (std::size_t d = 0; d < stages.size(); ++d) {
        const auto [err, energy] = masked_error(stages[d], H);
        std::printf("%zu,%.6f\n", d, 10.0 * std::log10(err / energy));
    }
    std::cerr << "wrote " << stages.size() << " images to " << a.out_dir << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"IRS channel estimation simulator: datasets, CDRN training, Monte Carlo NMSE sweeps"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* g = app.add_subcommand("gen-data", "generate an LS-based training set");
    g->add_option("--config", gen.config, "JSON config (system section)")->required();
    g->add_option("--snr-db", gen.snr_db, "training SNR in dB");
    g->add_option("--snr-db-max", gen.snr_db_max, "draw each example's SNR uniformly in [snr-db, snr-db-max]");
    g->add_option("--count", gen.count, "number of examples")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "master seed");
    g->add_option("--out", gen.out, "output dataset file")->required();

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "train a CDRN on a dataset file");
    t->add_option("--data", tr.data, "dataset file")->required();
    t->add_option("--net-config", tr.net_config, "JSON config (net section)")->required();
    t->add_option("--train-config", tr.train_config, "JSON config (train section)")->required();
    t->add_option("--out", tr.out, "output model file")->required();
    t->add_flag("--quiet", tr.quiet, "do not print the loss curve");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Monte Carlo NMSE of a trained model at one SNR");
    e->add_option("--model", ev.model, "model file")->required();
    e->add_option("--config", ev.config, "JSON config")->required();
    e->add_option("--snr-db", ev.snr_db, "evaluation SNR in dB");
    e->add_option("--trials", ev.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    e->add_option("--seed", ev.seed, "master seed");
    e->add_option("--out", ev.out, "CSV output (default stdout)");

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "NMSE sweep over SNR, N, M or C");
    s->add_option("--config", sw.config, "JSON config")->required();
    s->add_option("--kind", sw.kind, "swept variable")->required()->check(CLI::IsMember({"snr", "n", "m", "c"}));
    s->add_option("--out", sw.out, "CSV output (default stdout)");

    VisualizeArgs vi;
    auto* v = app.add_subcommand("visualize", "write per-block magnitude images of one denoising pass");
    v->add_option("--model", vi.model, "model file")->required();
    v->add_option("--config", vi.config, "JSON config")->required();
    v->add_option("--seed", vi.seed, "master seed");
    v->add_option("--snr-db", vi.snr_db, "SNR of the sample (default: the model's training SNR)");
    v->add_option("--out-dir", vi.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err);
    }

    try {
        if (g->parsed()) return run_gen_data(gen);
        if (t->parsed()) return run_train(tr);
        if (e->parsed()) return run_eval(ev);
        if (s->parsed()) return run_sweep_cmd(sw);
        if (v->parsed()) return run_visualize(vi);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace irschest
