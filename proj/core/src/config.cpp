/*
 * Copyright 2026 The pdfn-rc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pdfn/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pdfn {

namespace {

std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_keys(const toml::table& table, const std::string& where,
                std::initializer_list<std::string_view> allowed)
{
    for (const auto& [key, node] : table) {
        if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
            throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + where);
        }
    }
}

template <typename T>
void read(const toml::table& table, std::string_view key, T& out, const std::string& where)
{
    const toml::node* node = table.get(key);
    if (node == nullptr) {
        return;
    }
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node->value_exact<bool>()) {
            out = *v;
            return;
        }
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node->value_exact<std::string>()) {
            out = *v;
            return;
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node->value<double>()) {
            out = *v;
            return;
        }
    } else if constexpr (std::is_integral_v<T>) {
        if (auto v = node->value_exact<std::int64_t>()) {
            if (*v < 0) {
                throw ConfigError(where + "." + std::string(key) + " must be non-negative");
            }
            out = static_cast<T>(*v);
            return;
        }
    }
    throw ConfigError("wrong type for " + where + "." + std::string(key));
}

const toml::table* subtable(const toml::table& root, std::string_view name)
{
    const toml::node* node = root.get(name);
    if (node == nullptr) {
        return nullptr;
    }
    if (!node->is_table()) {
        throw ConfigError("'" + std::string(name) + "' must be a table");
    }
    return node->as_table();
}

toml::table parse_toml(const std::string& text, const std::string& origin)
{
    try {
        return toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ':' << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

template <typename T, typename Fn>
std::vector<T> read_array(const toml::table& table, std::string_view key, Fn convert)
{
    std::vector<T> out;
    const toml::node* node = table.get(key);
    if (node == nullptr) {
        return out;
    }
    const toml::array* arr = node->as_array();
    if (arr == nullptr) {
        throw ConfigError("grid." + std::string(key) + " must be an array");
    }
    for (const auto& item : *arr) {
        out.push_back(convert(item));
    }
    return out;
}

} // namespace

std::string to_string(QuantizerRange r)
{
    return r == QuantizerRange::Reachable ? "reachable" : "full";
}

QuantizerRange parse_quantizer_range(const std::string& text)
{
    if (text == "reachable") {
        return QuantizerRange::Reachable;
    }
    if (text == "full") {
        return QuantizerRange::Full;
    }
    throw ConfigError("unknown quantizer range '" + text + "' (expected reachable or full)");
}

void ExperimentConfig::validate(std::size_t rows, std::size_t cols) const
{
    try {
        device.validate();
        encoding.validate(rows, cols);
        train.validate();
        variability.validate();
        quantizer(rows, cols).validate();
        read_line(v_read, device);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!(v_write > device.v_th)) {
        throw ConfigError("v_write must exceed the device threshold");
    }
}

QuantizerConfig ExperimentConfig::quantizer(std::size_t rows, std::size_t cols) const
{
    const auto [lo, hi] = range == QuantizerRange::Full
                              ? full_device_range(device, v_read)
                              : reachable_range(device, v_read, v_write, latency(encoding, rows, cols));
    return QuantizerConfig{bits, lo, hi};
}

std::string ExperimentConfig::canonical() const
{
    std::ostringstream os;
    os << "schema=1\n"
       << "dimension=" << to_string(encoding.dimension) << '\n'
       << "parity=" << encoding.parity << '\n'
       << "sections=" << encoding.sections << '\n'
       << "binarize_threshold=" << encoding.binarize_threshold << '\n'
       << "alpha=" << fmt_double(device.alpha) << '\n'
       << "beta=" << fmt_double(device.beta) << '\n'
       << "gamma=" << fmt_double(device.gamma) << '\n'
       << "delta=" << fmt_double(device.delta) << '\n'
       << "lambda_rate=" << fmt_double(device.lambda_rate) << '\n'
       << "eta=" << fmt_double(device.eta) << '\n'
       << "x_max=" << fmt_double(device.x_max) << '\n'
       << "x_min=" << fmt_double(device.x_min) << '\n'
       << "v_th=" << fmt_double(device.v_th) << '\n'
       << "t_pulse=" << fmt_double(device.t_pulse) << '\n'
       << "tau=" << fmt_double(device.tau) << '\n'
       << "v_write=" << fmt_double(v_write) << '\n'
       << "v_read=" << fmt_double(v_read) << '\n'
       << "bits=" << bits << '\n'
       << "range=" << to_string(range) << '\n'
       << "epochs=" << train.epochs << '\n'
       << "learning_rate=" << fmt_double(train.learning_rate) << '\n'
       << "shuffle=" << train.shuffle << '\n'
       << "bias=" << train.bias << '\n'
       << "train_limit=" << train_limit << '\n'
       << "d2d_pct=" << fmt_double(variability.d2d_pct) << '\n'
       << "c2c_pct=" << fmt_double(variability.c2c_pct) << '\n'
       << "vary_lambda_eta=" << variability.vary_lambda_eta << '\n'
       << "runs=" << variability.runs << '\n'
       << "distribution=" << to_string(variability.distribution) << '\n'
       << "seed=" << seed << '\n';
    return os.str();
}

std::string ExperimentConfig::hash() const
{
    return fnv1a_hex(canonical());
}

std::string ExperimentConfig::feature_hash(std::size_t run) const
{
    ExperimentConfig c = *this;
    // Readout settings do not change reservoir outputs.
    c.train = TrainConfig{};
    c.train_limit = 0;
    c.variability.runs = 1;
    if (!variability.enabled()) {
        c.seed = 0;
        run = 0;
    }
    return fnv1a_hex(c.canonical() + "run=" + std::to_string(run) + '\n');
}

double ExperimentConfig::variability_pct() const
{
    return 100.0 * std::max(variability.d2d_pct, variability.c2c_pct);
}

std::size_t SweepGrid::size() const
{
    const auto n = [](std::size_t s) { return std::max<std::size_t>(s, 1); };
    return n(dimension.size()) * n(parity.size()) * n(sections.size()) * n(bits.size()) *
           n(tau_ns.size()) * n(variability_pct.size()) * n(seeds.size());
}

ExperimentConfig parse_config(const std::string& toml_text, const std::string& origin)
{
    const toml::table root = parse_toml(toml_text, origin);
    check_keys(root, origin,
               {"seed", "threads", "data", "output", "encoding", "device", "quantizer", "train",
                "variability", "grid"});
    ExperimentConfig cfg;
    read(root, "seed", cfg.seed, "root");
    read(root, "threads", cfg.threads, "root");

    if (const auto* t = subtable(root, "data")) {
        check_keys(*t, "[data]", {"dir"});
        std::string dir;
        read(*t, "dir", dir, "data");
        cfg.data_dir = dir;
    }
    if (const auto* t = subtable(root, "output")) {
        check_keys(*t, "[output]", {"dir", "checkpoint", "record_runtime", "cache_dir"});
        std::string dir = cfg.output_dir.string();
        std::string cache;
        read(*t, "dir", dir, "output");
        read(*t, "cache_dir", cache, "output");
        read(*t, "checkpoint", cfg.save_checkpoint, "output");
        read(*t, "record_runtime", cfg.record_runtime, "output");
        cfg.output_dir = dir;
        cfg.cache_dir = cache;
    }
    if (const auto* t = subtable(root, "encoding")) {
        check_keys(*t, "[encoding]", {"dimension", "parity", "sections", "binarize_threshold"});
        std::string dim = to_string(cfg.encoding.dimension);
        read(*t, "dimension", dim, "encoding");
        try {
            cfg.encoding.dimension = parse_dimension(dim);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        read(*t, "parity", cfg.encoding.parity, "encoding");
        read(*t, "sections", cfg.encoding.sections, "encoding");
        read(*t, "binarize_threshold", cfg.encoding.binarize_threshold, "encoding");
    }
    if (const auto* t = subtable(root, "device")) {
        check_keys(*t, "[device]",
                   {"tau_ns", "alpha", "beta", "gamma", "delta", "lambda_rate", "eta", "x_max", "x_min",
                    "v_th", "t_pulse_ns", "v_write", "v_read"});
        double tau_ns = cfg.device.tau * 1e9;
        double t_pulse_ns = cfg.device.t_pulse * 1e9;
        read(*t, "tau_ns", tau_ns, "device");
        read(*t, "t_pulse_ns", t_pulse_ns, "device");
        cfg.device.tau = tau_ns * 1e-9;
        cfg.device.t_pulse = t_pulse_ns * 1e-9;
        read(*t, "alpha", cfg.device.alpha, "device");
        read(*t, "beta", cfg.device.beta, "device");
        read(*t, "gamma", cfg.device.gamma, "device");
        read(*t, "delta", cfg.device.delta, "device");
        read(*t, "lambda_rate", cfg.device.lambda_rate, "device");
        read(*t, "eta", cfg.device.eta, "device");
        read(*t, "x_max", cfg.device.x_max, "device");
        read(*t, "x_min", cfg.device.x_min, "device");
        read(*t, "v_th", cfg.device.v_th, "device");
        read(*t, "v_write", cfg.v_write, "device");
        read(*t, "v_read", cfg.v_read, "device");
    }
    if (const auto* t = subtable(root, "quantizer")) {
        check_keys(*t, "[quantizer]", {"bits", "range"});
        std::string range = to_string(cfg.range);
        read(*t, "bits", cfg.bits, "quantizer");
        read(*t, "range", range, "quantizer");
        cfg.range = parse_quantizer_range(range);
    }
    if (const auto* t = subtable(root, "train")) {
        check_keys(*t, "[train]", {"epochs", "learning_rate", "shuffle", "bias", "train_limit"});
        read(*t, "epochs", cfg.train.epochs, "train");
        read(*t, "learning_rate", cfg.train.learning_rate, "train");
        read(*t, "shuffle", cfg.train.shuffle, "train");
        read(*t, "bias", cfg.train.bias, "train");
        read(*t, "train_limit", cfg.train_limit, "train");
    }
    if (const auto* t = subtable(root, "variability")) {
        check_keys(*t, "[variability]",
                   {"d2d_pct", "c2c_pct", "vary_lambda_eta", "runs", "distribution"});
        std::string dist = to_string(cfg.variability.distribution);
        read(*t, "d2d_pct", cfg.variability.d2d_pct, "variability");
        read(*t, "c2c_pct", cfg.variability.c2c_pct, "variability");
        read(*t, "vary_lambda_eta", cfg.variability.vary_lambda_eta, "variability");
        read(*t, "runs", cfg.variability.runs, "variability");
        read(*t, "distribution", dist, "variability");
        try {
            cfg.variability.distribution = parse_distribution(dist);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    cfg.train.seed = cfg.seed;
    cfg.variability.master_seed = cfg.seed;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(slurp(path), path.string());
}

SweepGrid parse_grid(const std::string& toml_text, const std::string& origin)
{
    const toml::table root = parse_toml(toml_text, origin);
    SweepGrid grid;
    const toml::table* t = subtable(root, "grid");
    if (t == nullptr) {
        return grid;
    }
    check_keys(*t, "[grid]",
               {"dimension", "parity", "sections", "bits", "tau_ns", "variability", "seeds"});
    const auto as_string = [](const toml::node& n) {
        auto v = n.value_exact<std::string>();
        if (!v) {
            throw ConfigError("grid: expected a string");
        }
        return *v;
    };
    const auto as_int = [](const toml::node& n) {
        auto v = n.value_exact<std::int64_t>();
        if (!v || *v < 0) {
            throw ConfigError("grid: expected a non-negative integer");
        }
        return *v;
    };
    const auto as_double = [](const toml::node& n) {
        auto v = n.value<double>();
        if (!v) {
            throw ConfigError("grid: expected a number");
        }
        return *v;
    };
    for (const auto& s : read_array<std::string>(*t, "dimension", as_string)) {
        grid.dimension.push_back(parse_dimension(s));
    }
    grid.parity = read_array<bool>(*t, "parity", [](const toml::node& n) {
        auto v = n.value_exact<bool>();
        if (!v) {
            throw ConfigError("grid: expected a boolean");
        }
        return *v;
    });
    for (auto v : read_array<std::int64_t>(*t, "sections", as_int)) {
        grid.sections.push_back(static_cast<std::size_t>(v));
    }
    for (auto v : read_array<std::int64_t>(*t, "bits", as_int)) {
        grid.bits.push_back(static_cast<int>(v));
    }
    grid.tau_ns = read_array<double>(*t, "tau_ns", as_double);
    grid.variability_pct = read_array<double>(*t, "variability", as_double);
    for (double& v : grid.variability_pct) {
        v *= 100.0;
    }
    for (auto v : read_array<std::int64_t>(*t, "seeds", as_int)) {
        grid.seeds.push_back(static_cast<std::uint64_t>(v));
    }
    return grid;
}

SweepGrid load_grid(const std::filesystem::path& path)
{
    return parse_grid(slurp(path), path.string());
}

std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base, const SweepGrid& grid)
{
    std::vector<ExperimentConfig> out{base};
    const auto expand = [&out](const auto& values, auto apply) {
        if (values.empty()) {
            return;
        }
        std::vector<ExperimentConfig> next;
        next.reserve(out.size() * values.size());
        for (const auto& cfg : out) {
            for (const auto& v : values) {
                ExperimentConfig c = cfg;
                apply(c, v);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    };
    expand(grid.dimension, [](ExperimentConfig& c, Dimension d) { c.encoding.dimension = d; });
    expand(grid.parity, [](ExperimentConfig& c, bool p) { c.encoding.parity = p; });
    expand(grid.sections, [](ExperimentConfig& c, std::size_t k) { c.encoding.sections = k; });
    expand(grid.bits, [](ExperimentConfig& c, int b) { c.bits = b; });
    expand(grid.tau_ns, [](ExperimentConfig& c, double t) { c.device.tau = t * 1e-9; });
    expand(grid.variability_pct, [](ExperimentConfig& c, double pct) {
        c.variability.d2d_pct = pct / 100.0;
        c.variability.c2c_pct = pct / 100.0;
    });
    expand(grid.seeds, [](ExperimentConfig& c, std::uint64_t s) {
        c.seed = s;
        c.train.seed = s;
        c.variability.master_seed = s;
    });
    return out;
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pdfn
