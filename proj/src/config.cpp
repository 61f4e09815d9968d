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

#include "irschest/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "irschest/errors.hpp"
#include "json.hpp"

namespace irschest {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

double get_double(const json& v, const std::string& key) {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) bad(key, "must be non-negative");
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && d == std::floor(d) && d < 9.0e15) return static_cast<std::size_t>(d);
    }
    bad(key, "expected a non-negative integer");
}

std::uint64_t get_u64(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    return get_count(v, key);
}

std::vector<double> get_doubles(const json& v, const std::string& key) {
    if (!v.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_double(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

using Setter = std::function<void(const json&, const std::string&)>;

void apply_section(const json& obj, const std::string& section, const std::map<std::string, Setter>& fields) {
    if (!obj.is_object()) bad(section, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("unknown config key '" + full + "'");
        it->second(value, full);
    }
}

void read_system(const json& obj, SystemConfig& s) {
    auto cnt = [](std::size_t& dst) { return [&dst](const json& v, const std::string& k) { dst = get_count(v, k); }; };
    auto num = [](double& dst) { return [&dst](const json& v, const std::string& k) { dst = get_double(v, k); }; };
    auto list = [](std::vector<double>& dst) {
        return [&dst](const json& v, const std::string& k) { dst = get_doubles(v, k); };
    };
    apply_section(obj, "system",
                  {{"M", cnt(s.M)},
                   {"N", cnt(s.N)},
                   {"K", cnt(s.K)},
                   {"C", cnt(s.C)},
                   {"L", cnt(s.L)},
                   {"tx_power", num(s.tx_power)},
                   {"sigma_z_sq", num(s.sigma_z_sq)},
                   {"dist_ub", num(s.dist_ub)},
                   {"dist_ib", num(s.dist_ib)},
                   {"dist_ui", num(s.dist_ui)},
                   {"exp_ub", num(s.exp_ub)},
                   {"exp_ib", num(s.exp_ib)},
                   {"exp_ui", num(s.exp_ui)},
                   {"ref_dist", num(s.ref_dist)},
                   {"ref_loss", num(s.ref_loss)},
                   {"rice_ub", num(s.rice_ub)},
                   {"rice_ib", num(s.rice_ib)},
                   {"rice_ui", num(s.rice_ui)},
                   {"user_dist_ub", list(s.user_dist_ub)},
                   {"user_dist_ui", list(s.user_dist_ui)}});
}

void read_sweep(const json& obj, SweepSettings& s) {
    auto list = [](std::vector<double>& dst) {
        return [&dst](const json& v, const std::string& k) { dst = get_doubles(v, k); };
    };
    apply_section(
        obj, "sweep",
        {{"snr_db", list(s.snr_db)},
         {"n_elements", list(s.n_elements)},
         {"m_antennas", list(s.m_antennas)},
         {"c_pilots", list(s.c_pilots)},
         {"estimators",
          [&s](const json& v, const std::string& k) {
              if (!v.is_array()) bad(k, "expected an array of estimator names");
              s.estimators.clear();
              for (const auto& e : v) {
                  if (!e.is_string()) bad(k, "estimator names must be strings");
                  try {
                      s.estimators.push_back(parse_estimator(e.get<std::string>()));
                  } catch (const ConfigError& err) {
                      bad(k, err.what());
                  }
              }
          }},
         {"trials", [&s](const json& v, const std::string& k) { s.trials = get_count(v, k); }},
         {"seed", [&s](const json& v, const std::string& k) { s.seed = get_u64(v, k); }},
         {"elmmse_draws", [&s](const json& v, const std::string& k) { s.elmmse_draws = get_count(v, k); }},
         {"fixed_snr_db",
          [&s](const json& v, const std::string& k) {
              if (v.is_null())
                  s.fixed_snr_db.reset();
              else
                  s.fixed_snr_db = get_double(v, k);
          }},
         {"cdrn_models", [&s](const json& v, const std::string& k) {
              if (!v.is_array()) bad(k, "expected an array of {value, path} objects");
              s.cdrn_models.clear();
              for (std::size_t i = 0; i < v.size(); ++i) {
                  const std::string ek = k + "[" + std::to_string(i) + "]";
                  double value = std::nan("");
                  std::string path;
                  apply_section(v[i], ek,
                                {{"value", [&](const json& x, const std::string& kk) { value = get_double(x, kk); }},
                                 {"path", [&](const json& x, const std::string& kk) {
                                      if (!x.is_string()) bad(kk, "expected a string");
                                      path = x.get<std::string>();
                                  }}});
                  if (std::isnan(value) || path.empty()) bad(ek, "needs both 'value' and 'path'");
                  s.cdrn_models.emplace_back(value, path);
              }
          }}});
}

void read_net(const json& obj, CdrnConfig& n) {
    auto cnt = [](std::size_t& dst) { return [&dst](const json& v, const std::string& k) { dst = get_count(v, k); }; };
    apply_section(obj, "net",
                  {{"blocks", cnt(n.blocks)},
                   {"layers_per_block", cnt(n.layers_per_block)},
                   {"filters", cnt(n.filters)},
                   {"kernel", cnt(n.kernel)}});
}

void read_train(const json& obj, TrainConfig& t) {
    auto num = [](double& dst) { return [&dst](const json& v, const std::string& k) { dst = get_double(v, k); }; };
    apply_section(obj, "train",
                  {{"learning_rate", num(t.learning_rate)},
                   {"batch_size", [&t](const json& v, const std::string& k) { t.batch_size = get_count(v, k); }},
                   {"epochs", [&t](const json& v, const std::string& k) { t.epochs = get_count(v, k); }},
                   {"beta1", num(t.beta1)},
                   {"beta2", num(t.beta2)},
                   {"epsilon", num(t.epsilon)},
                   {"seed", [&t](const json& v, const std::string& k) { t.seed = get_u64(v, k); }},
                   {"validation_fraction", num(t.validation_fraction)}});
}

void read_data(const json& obj, DataSettings& d) {
    apply_section(obj, "data",
                  {{"count", [&d](const json& v, const std::string& k) { d.count = get_count(v, k); }},
                   {"snr_db", [&d](const json& v, const std::string& k) { d.snr_db = get_double(v, k); }},
                   {"seed", [&d](const json& v, const std::string& k) { d.seed = get_u64(v, k); }}});
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
    const json doc = parse_json(json_text);
    AppConfig cfg;
    apply_section(doc, "",
                  {{"system", [&](const json& v, const std::string&) { read_system(v, cfg.system); }},
                   {"sweep", [&](const json& v, const std::string&) { read_sweep(v, cfg.sweep); }},
                   {"net", [&](const json& v, const std::string&) { read_net(v, cfg.net); }},
                   {"train", [&](const json& v, const std::string&) { read_train(v, cfg.train); }},
                   {"data", [&](const json& v, const std::string&) { read_data(v, cfg.data); }}});
    cfg.system.validate();
    cfg.net.validate();
    cfg.train.validate();
    return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string system_config_to_json(const SystemConfig& s) {
    const json j = {{"M", s.M},
                    {"N", s.N},
                    {"K", s.K},
                    {"C", s.C},
                    {"L", s.L},
                    {"tx_power", s.tx_power},
                    {"sigma_z_sq", s.sigma_z_sq},
                    {"dist_ub", s.dist_ub},
                    {"dist_ib", s.dist_ib},
                    {"dist_ui", s.dist_ui},
                    {"exp_ub", s.exp_ub},
                    {"exp_ib", s.exp_ib},
                    {"exp_ui", s.exp_ui},
                    {"ref_dist", s.ref_dist},
                    {"ref_loss", s.ref_loss},
                    {"rice_ub", s.rice_ub},
                    {"rice_ib", s.rice_ib},
                    {"rice_ui", s.rice_ui},
                    {"user_dist_ub", s.user_dist_ub},
                    {"user_dist_ui", s.user_dist_ui}};
    return j.dump();
}

SystemConfig system_config_from_json(const std::string& json_text) {
    SystemConfig s;
    read_system(parse_json(json_text), s);
    s.validate();
    return s;
}

SweepSpec make_sweep_spec(const AppConfig& cfg, SweepVariable variable) {
    SweepSpec spec;
    spec.variable = variable;
    switch (variable) {
        case SweepVariable::SnrDb: spec.values = cfg.sweep.snr_db; break;
        case SweepVariable::NElements: spec.values = cfg.sweep.n_elements; break;
        case SweepVariable::MAntennas: spec.values = cfg.sweep.m_antennas; break;
        case SweepVariable::CPilots: spec.values = cfg.sweep.c_pilots; break;
    }
    spec.estimators = cfg.sweep.estimators;
    spec.trials = cfg.sweep.trials;
    spec.base = cfg.system;
    spec.seed = cfg.sweep.seed;
    spec.elmmse_draws = cfg.sweep.elmmse_draws;
    spec.fixed_snr_db = cfg.sweep.fixed_snr_db;
    return spec;
}

}  // namespace irschest
