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

#include "irschest/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "irschest/dataset.hpp"
#include "irschest/errors.hpp"
#include "irschest/estimators.hpp"
#include "irschest/pilot_protocol.hpp"

namespace irschest {

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::SnrDb: return "snr_db";
        case SweepVariable::NElements: return "n_elements";
        case SweepVariable::MAntennas: return "m_antennas";
        case SweepVariable::CPilots: return "c_pilots";
    }
    return "?";
}

std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::LS: return "LS";
        case EstimatorKind::ELMMSE: return "ELMMSE";
        case EstimatorKind::BLMMSE: return "BLMMSE";
        case EstimatorKind::CDRN: return "CDRN";
        case EstimatorKind::MMSE_GAUSSIAN: return "MMSE_GAUSSIAN";
    }
    return "?";
}

SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "snr" || s == "snr_db") return SweepVariable::SnrDb;
    if (s == "n" || s == "n_elements") return SweepVariable::NElements;
    if (s == "m" || s == "m_antennas") return SweepVariable::MAntennas;
    if (s == "c" || s == "c_pilots") return SweepVariable::CPilots;
    throw ConfigError("unknown sweep kind '" + s + "' (expected snr, n, m or c)");
}

EstimatorKind parse_estimator(const std::string& s) {
    for (auto e : {EstimatorKind::LS, EstimatorKind::ELMMSE, EstimatorKind::BLMMSE, EstimatorKind::CDRN,
                   EstimatorKind::MMSE_GAUSSIAN})
        if (s == to_string(e)) return e;
    throw ConfigError("unknown estimator '" + s + "'");
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep: no values to sweep");
    if (trials == 0) throw ConfigError("sweep: trials must be >= 1");
    if (estimators.empty()) throw ConfigError("sweep: no estimators selected");
    const bool needs_r = std::any_of(estimators.begin(), estimators.end(), [](EstimatorKind e) {
        return e == EstimatorKind::ELMMSE || e == EstimatorKind::BLMMSE;
    });
    if (needs_r && elmmse_draws == 0) throw ConfigError("sweep: elmmse_draws must be >= 1");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("sweep: swept values must be finite");
        if (variable != SweepVariable::SnrDb && (v < 1 || v != std::floor(v)))
            throw ConfigError("sweep: " + to_string(variable) + " values must be positive integers");
    }
    if (fixed_snr_db && !std::isfinite(*fixed_snr_db)) throw ConfigError("sweep: fixed_snr_db must be finite");
}

SystemConfig point_config(const SweepSpec& spec, double value) {
    SystemConfig cfg = spec.base;
    if (spec.fixed_snr_db && spec.variable != SweepVariable::SnrDb)
        cfg.sigma_z_sq = noise_variance_for_snr(*spec.fixed_snr_db, cfg.tx_power);
    const auto n = static_cast<std::size_t>(value);
    switch (spec.variable) {
        case SweepVariable::SnrDb: cfg.sigma_z_sq = noise_variance_for_snr(value, cfg.tx_power); break;
        case SweepVariable::NElements:
            cfg.N = n;
            cfg.C = n + 1;
            break;
        case SweepVariable::MAntennas: cfg.M = n; break;
        case SweepVariable::CPilots: cfg.C = n; break;
    }
    cfg.validate();
    return cfg;
}

std::size_t evaluation_threads() {
    if (const char* env = std::getenv("IRS_CHEST_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs body(i) for i in [0, n). Work items must write disjoint outputs; the first exception is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

constexpr std::size_t kCorrelationChunks = 64;
constexpr std::size_t kCdrnChunk = 256;

// Empirical E[H_k^H H_k] per user, summed over fixed chunks so the result is thread-count independent.
std::vector<CMatrix> empirical_user_correlations(const SystemConfig& cfg, std::size_t draws, std::uint64_t seed,
                                                 std::size_t point, std::size_t threads) {
    const std::size_t chunks = std::min(kCorrelationChunks, draws);
    std::vector<std::vector<CMatrix>> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t first = draws * c / chunks, last = draws * (c + 1) / chunks;
        SeededRng rng(seed, derive_stream({stream_tag::correlation, point, c}));
        std::vector<CorrelationAccumulator> acc(cfg.K);
        for (std::size_t i = first; i < last; ++i) {
            const ChannelRealization chan = sample_channels(cfg, rng);
            for (std::size_t k = 0; k < cfg.K; ++k) acc[k].add(chan.H[k]);
        }
        for (auto& a : acc) {
            CMatrix sum = a.result();
            sum *= static_cast<double>(a.count());
            partial[c].push_back(std::move(sum));
        }
    });
    std::vector<CMatrix> r = partial[0];
    for (std::size_t c = 1; c < chunks; ++c)
        for (std::size_t k = 0; k < cfg.K; ++k) r[k] += partial[c][k];
    for (auto& m : r) m *= 1.0 / static_cast<double>(draws);
    return r;
}

// Squared error and truth energy: full matrix, direct column, cascaded columns.
struct TrialError {
    std::array<double, 3> err{};
    std::array<double, 3> energy{};
};

TrialError trial_error(const CMatrix& estimate, const CMatrix& truth) {
    TrialError t;
    const auto full = masked_error(estimate, truth);
    const auto d = masked_error(estimate, truth, direct_columns());
    const auto b = masked_error(estimate, truth, cascaded_columns(truth.cols() - 1));
    t.err = {full.first, d.first, b.first};
    t.energy = {full.second, d.second, b.second};
    return t;
}

double to_db(double x) { return 10.0 * std::log10(x); }

ResultRow summarize(const SweepSpec& spec, double value, EstimatorKind e, const std::vector<TrialError>& trials) {
    std::array<double, 3> err{}, energy{};
    for (const auto& t : trials)
        for (int i = 0; i < 3; ++i) {
            err[i] += t.err[i];
            energy[i] += t.energy[i];
        }
    for (int i = 0; i < 3; ++i)
        if (!(energy[i] > 0.0)) throw DomainError("run_sweep: ground-truth energy is zero");

    const double n = static_cast<double>(trials.size());
    const double ratio = err[0] / energy[0];
    double se = 0.0;
    if (trials.size() > 1) {
        double ss = 0.0;
        for (const auto& t : trials) {
            const double r = t.err[0] - ratio * t.energy[0];
            ss += r * r;
        }
        se = std::sqrt(ss / (n * (n - 1.0))) / (energy[0] / n);
    }

    ResultRow row;
    row.swept_var = to_string(spec.variable);
    row.value = value;
    row.estimator = to_string(e);
    row.nmse_linear = ratio;
    row.nmse_db = to_db(ratio);
    row.nmse_direct = err[1] / energy[1];
    row.nmse_cascaded = err[2] / energy[2];
    row.nmse_direct_db = to_db(row.nmse_direct);
    row.nmse_cascaded_db = to_db(row.nmse_cascaded);
    row.trials = trials.size();
    row.seed = spec.seed;
    row.nmse_stderr = se;
    return row;
}

bool wants(const SweepSpec& spec, EstimatorKind e) {
    return std::find(spec.estimators.begin(), spec.estimators.end(), e) != spec.estimators.end();
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const ModelMap& models) {
    spec.validate();
    const bool use_cdrn = wants(spec, EstimatorKind::CDRN);
    const bool use_gauss = wants(spec, EstimatorKind::MMSE_GAUSSIAN);
    const bool use_emp = wants(spec, EstimatorKind::ELMMSE) || wants(spec, EstimatorKind::BLMMSE);

    // Every configuration problem is reported before any Monte Carlo work starts.
    std::vector<SystemConfig> configs;
    for (double v : spec.values) {
        configs.push_back(point_config(spec, v));
        const SystemConfig& cfg = configs.back();
        if (use_gauss && (cfg.rice_ub != 0.0 || cfg.rice_ui != 0.0))
            throw ConfigError("MMSE_GAUSSIAN requires rice_ub = rice_ui = 0 (Gaussian prior)");
        if (use_cdrn) {
            const auto it = models.find(v);
            std::ostringstream os;
            os << v;
            if (it == models.end()) throw ConfigError("no CDRN model for " + to_string(spec.variable) + " = " + os.str());
            if (it->second.height != cfg.M || it->second.width != cfg.N + 1)
                throw ConfigError("CDRN model for " + to_string(spec.variable) + " = " + os.str() +
                                  " has the wrong input shape");
        }
    }

    const std::size_t threads = evaluation_threads();
    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < spec.values.size(); ++p) {
        const SystemConfig& cfg = configs[p];
        const double sigma = cfg.sigma_z_sq;
        const PilotBook dft = make_dft_book(cfg);
        const CMatrix P_bin = build_binary_patterns(cfg.N);

        std::vector<LmmseContext> emp_ctx, emp_ctx_bin, gauss_ctx;
        if (use_emp) {
            for (CMatrix& r : empirical_user_correlations(cfg, spec.elmmse_draws, spec.seed, p, threads)) {
                emp_ctx.push_back({r, cfg.M, sigma, cfg.C});
                emp_ctx_bin.push_back({std::move(r), cfg.M, sigma, cfg.N + 1});
            }
        }
        if (use_gauss)
            for (std::size_t k = 0; k < cfg.K; ++k) gauss_ctx.push_back({analytic_correlation(cfg, k), cfg.M, sigma, cfg.C});

        const std::size_t T = spec.trials;
        std::vector<std::vector<TrialError>> slots(spec.estimators.size(), std::vector<TrialError>(T));
        std::vector<CMatrix> h_ls(use_cdrn ? T : 0), h_true(use_cdrn ? T : 0);

        parallel_for(T, threads, [&](std::size_t t) {
            SeededRng rng(spec.seed, derive_stream({stream_tag::trial, p, t}));
            const ChannelRealization chan = sample_channels(cfg, rng);
            const std::size_t k = t % cfg.K;
            const CMatrix& H = chan.H[k];
            const CMatrix X = direct_observation(H, dft.P, sigma, rng, k).X;
            const CMatrix X_bin = direct_observation(H, P_bin, sigma, rng, k).X;
            const CMatrix ls = ls_estimate_dft(X, dft.P);
            for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
                switch (spec.estimators[e]) {
                    case EstimatorKind::LS: slots[e][t] = trial_error(ls, H); break;
                    case EstimatorKind::ELMMSE:
                        slots[e][t] = trial_error(lmmse_estimate_dft(X, dft.P, emp_ctx[k]), H);
                        break;
                    case EstimatorKind::BLMMSE:
                        slots[e][t] = trial_error(blmmse_estimate(X_bin, P_bin, emp_ctx_bin[k]), H);
                        break;
                    case EstimatorKind::MMSE_GAUSSIAN:
                        slots[e][t] = trial_error(lmmse_estimate_dft(X, dft.P, gauss_ctx[k]), H);
                        break;
                    case EstimatorKind::CDRN:
                        h_ls[t] = ls;
                        h_true[t] = H;
                        break;
                }
            }
        });

        if (use_cdrn) {
            const CdrnModel& model = models.at(spec.values[p]);
            const std::size_t e =
                static_cast<std::size_t>(std::find(spec.estimators.begin(), spec.estimators.end(), EstimatorKind::CDRN) -
                                         spec.estimators.begin());
            const std::size_t chunks = (T + kCdrnChunk - 1) / kCdrnChunk;
            parallel_for(chunks, threads, [&](std::size_t c) {
                const std::size_t first = c * kCdrnChunk, count = std::min(kCdrnChunk, T - first);
                Tensor4 in(count, cfg.M, cfg.N + 1, 2);
                for (std::size_t i = 0; i < count; ++i) store_sample(in, i, h_ls[first + i]);
                for (double& v : in.data) v *= model.input_scale;
                const Tensor4 out = cdrn_infer(model, in, count);
                for (std::size_t i = 0; i < count; ++i) {
                    CMatrix est = from_real_output(out, i);
                    est *= 1.0 / model.input_scale;
                    slots[e][first + i] = trial_error(est, h_true[first + i]);
                }
            });
        }

        for (std::size_t e = 0; e < spec.estimators.size(); ++e)
            rows.push_back(summarize(spec, spec.values[p], spec.estimators[e], slots[e]));
    }
    return rows;
}

void write_csv_header(std::ostream& out) {
    out << "swept_var,value,estimator,nmse_linear,nmse_db,nmse_direct_db,nmse_cascaded_db,trials,seed\n";
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    write_csv_header(out);
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%zu,%llu\n", r.swept_var.c_str(), r.value,
                      r.estimator.c_str(), r.nmse_linear, r.nmse_db, r.nmse_direct_db, r.nmse_cascaded_db, r.trials,
                      static_cast<unsigned long long>(r.seed));
        out << buf;
    }
}

}  // namespace irschest
