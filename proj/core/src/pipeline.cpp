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

#include "pdfn/pipeline.hpp"

#include "pdfn/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pdfn {

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::vector<GrayImage> gather(const std::vector<GrayImage>& images, std::span<const std::size_t> idx)
{
    std::vector<GrayImage> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(images[i]);
    }
    return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> idx)
{
    FeatureMatrix out{idx.size(), m.cols, m.bits, {}};
    out.bins.reserve(idx.size() * m.cols);
    for (std::size_t i : idx) {
        const auto first = m.bins.begin() + static_cast<std::ptrdiff_t>(i * m.cols);
        out.bins.insert(out.bins.end(), first, first + static_cast<std::ptrdiff_t>(m.cols));
    }
    return out;
}

// Cache file: "pdfn-features v1 <rows> <cols> <bits>\n" then uint16 bins, little-endian.
bool load_cached(const std::filesystem::path& path, FeatureMatrix& m)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return false;
    }
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string magic;
    std::string version;
    header >> magic >> version >> m.rows >> m.cols >> m.bits;
    if (!header || magic != "pdfn-features" || version != "v1") {
        return false;
    }
    std::vector<unsigned char> raw(m.rows * m.cols * 2);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
        return false;
    }
    m.bins.resize(m.rows * m.cols);
    for (std::size_t i = 0; i < m.bins.size(); ++i) {
        m.bins[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
    return true;
}

void store_cached(const std::filesystem::path& path, const FeatureMatrix& m)
{
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << "pdfn-features v1 " << m.rows << ' ' << m.cols << ' ' << m.bits << '\n';
        std::vector<unsigned char> raw(m.bins.size() * 2);
        for (std::size_t i = 0; i < m.bins.size(); ++i) {
            raw[2 * i] = static_cast<unsigned char>(m.bins[i] & 0xff);
            raw[2 * i + 1] = static_cast<unsigned char>(m.bins[i] >> 8);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!out) {
            throw std::runtime_error("cannot write feature cache " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

double round_ns(double seconds)
{
    return std::round(seconds * 1e18) / 1e9;
}

} // namespace

std::vector<std::size_t> training_subset(std::size_t n, std::size_t limit, std::uint64_t seed)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (limit == 0 || limit >= n) {
        return idx;
    }
    std::mt19937_64 rng(derive_key({seed, stream_tag::subset}));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
    return idx;
}

FeatureSet build_features(const ExperimentConfig& cfg, const Dataset& data, std::size_t run)
{
    if (data.train.images.empty() || data.test.images.empty()) {
        throw StageError("dataset", "empty train or test split");
    }
    const std::size_t rows = data.train.images.front().rows;
    const std::size_t cols = data.train.images.front().cols;
    in_stage("config", [&] { cfg.validate(rows, cols); });

    const std::size_t n_devices = reservoir_size(cfg.encoding, rows, cols);
    const Reservoir reservoir = in_stage("reservoir", [&] {
        if (cfg.variability.d2d_pct > 0.0) {
            return Reservoir(cfg.device,
                             sample_reservoir_factors(cfg.variability, cfg.device, run, n_devices),
                             cfg.v_write, cfg.v_read);
        }
        return Reservoir(cfg.device, n_devices, cfg.v_write, cfg.v_read);
    });
    const QuantizerConfig q = cfg.quantizer(rows, cols);
    const CycleNoiseFactory noise =
        cfg.variability.c2c_pct > 0.0
            ? CycleNoiseFactory(cfg.variability, derive_key({cfg.seed, stream_tag::cycle, run}))
            : CycleNoiseFactory{};
    const auto subset = training_subset(data.train.size(), cfg.train_limit, cfg.seed);
    const bool full_train = subset.size() == data.train.size();

    const auto extract = [&](std::span<const GrayImage> images, std::uint64_t key_base) {
        return in_stage("reservoir",
                        [&] { return extract_features(images, cfg.encoding, reservoir, q, noise, key_base,
                                                      std::max(1u, cfg.threads)); });
    };

    FeatureSet out;
    if (cfg.cache_dir.empty()) {
        if (full_train) {
            out.train = extract(data.train.images, 0);
        } else if (!noise.active()) {
            out.train = extract(gather(data.train.images, subset), 0);
        } else {
            // Cycle-noise keys follow the global image index, so a subset sees
            // exactly the noise of the full run.
            out.train = FeatureMatrix{subset.size(), n_devices, q.bits, {}};
            out.train.bins.reserve(subset.size() * n_devices);
            for (std::size_t i : subset) {
                const auto one = extract(std::span(&data.train.images[i], 1), i);
                out.train.bins.insert(out.train.bins.end(), one.bins.begin(), one.bins.end());
            }
        }
        out.test = extract(data.test.images, kTestImageKeyBase);
        return out;
    }

    const std::string key = cfg.feature_hash(run);
    const auto train_path = cfg.cache_dir / ("train-" + key + ".bin");
    const auto test_path = cfg.cache_dir / ("test-" + key + ".bin");
    FeatureMatrix train_all;
    if (!load_cached(train_path, train_all) || train_all.rows != data.train.size() ||
        train_all.cols != n_devices) {
        train_all = extract(data.train.images, 0);
        in_stage("cache", [&] { store_cached(train_path, train_all); });
    }
    if (!load_cached(test_path, out.test) || out.test.rows != data.test.size() ||
        out.test.cols != n_devices) {
        out.test = extract(data.test.images, kTestImageKeyBase);
        in_stage("cache", [&] { store_cached(test_path, out.test); });
    }
    out.train = full_train ? std::move(train_all) : select_rows(train_all, subset);
    return out;
}

SweepRecord make_record(const ExperimentConfig& cfg, double accuracy)
{
    SweepRecord r;
    r.dimension = cfg.encoding.dimension;
    r.parity = cfg.encoding.parity;
    r.sections = cfg.encoding.sections;
    r.bits = cfg.bits;
    r.tau_ns = round_ns(cfg.device.tau);
    r.variability_pct = cfg.variability_pct();
    r.seed = cfg.seed;
    r.accuracy = accuracy;
    r.config_hash = cfg.hash();
    return r;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, const Dataset& data, std::size_t run)
{
    const auto t0 = std::chrono::steady_clock::now();
    const FeatureSet features = build_features(cfg, data, run);
    const auto subset = training_subset(data.train.size(), cfg.train_limit, cfg.seed);
    std::vector<std::uint8_t> train_labels;
    train_labels.reserve(subset.size());
    for (std::size_t i : subset) {
        train_labels.push_back(data.train.labels[i]);
    }

    PipelineResult result;
    result.weights = in_stage("train", [&] {
        TrainConfig tc = cfg.train;
        tc.seed = cfg.seed;
        return train(features.train, train_labels,
                     init_weights(features.train.cols, 10, cfg.seed, tc.bias), tc)
            .weights;
    });
    in_stage("evaluate", [&] {
        const auto predicted = predict_all(result.weights, features.test);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            const std::uint8_t truth = data.test.labels[i];
            ++result.confusion[truth][predicted[i]];
            correct += predicted[i] == truth;
        }
        result.test_accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
    });
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.record = make_record(cfg, result.test_accuracy);
    if (cfg.record_runtime) {
        result.record.runtime_s = result.runtime_s;
    }
    return result;
}

void write_run_outputs(const ExperimentConfig& cfg, const PipelineResult& result)
{
    in_stage("output", [&] {
        std::filesystem::create_directories(cfg.output_dir);
        {
            std::ofstream out(cfg.output_dir / "records.csv");
            write_records_csv(out, std::span(&result.record, 1));
        }
        {
            std::ofstream out(cfg.output_dir / "confusion.csv");
            out << "true_label";
            for (int c = 0; c < 10; ++c) {
                out << ",pred_" << c;
            }
            out << '\n';
            for (int t = 0; t < 10; ++t) {
                out << t;
                for (int c = 0; c < 10; ++c) {
                    out << ',' << result.confusion[t][c];
                }
                out << '\n';
            }
        }
        if (cfg.save_checkpoint) {
            save_checkpoint(cfg.output_dir / "readout.ckpt", result.weights, cfg.seed, cfg.hash());
        }
    });
}

MonteCarloStats monte_carlo(const ExperimentConfig& cfg, const Dataset& data)
{
    return run_monte_carlo(cfg.variability.runs, [&](std::size_t run) {
        return run_pipeline(cfg, data, run).test_accuracy;
    });
}

SweepOutcome factor_sweep(std::span<const ExperimentConfig> grid, const Dataset& data,
                          const std::function<void(const SweepRecord&)>& on_record,
                          const std::function<void(const SweepFailure&)>& on_failure)
{
    if (grid.empty()) {
        throw std::invalid_argument("factor_sweep: empty grid");
    }
    SweepOutcome outcome;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            outcome.records.push_back(run_pipeline(grid[i], data).record);
            if (on_record) {
                on_record(outcome.records.back());
            }
        } catch (const std::exception& e) {
            outcome.failures.push_back({i, grid[i].hash(), e.what()});
            if (on_failure) {
                on_failure(outcome.failures.back());
            }
        }
    }
    return outcome;
}

} // namespace pdfn
