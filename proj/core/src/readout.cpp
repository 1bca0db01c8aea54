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

#include "pdfn/readout.hpp"

#include "pdfn/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pdfn {

namespace {

// Nonzero entries of every sample; zero features contribute nothing to the
// logits or the update, and most reservoir features are zero.
struct SparseDesign {
    std::size_t cols = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    std::size_t rows() const { return offsets.size() - 1; }
};

SparseDesign to_sparse(const FeatureMatrix& m)
{
    SparseDesign s;
    s.cols = m.cols;
    s.offsets.reserve(m.rows + 1);
    const double top = static_cast<double>((1u << m.bits) - 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const std::uint16_t bin = m.bins[r * m.cols + c];
            if (bin != 0) {
                s.index.push_back(static_cast<std::uint32_t>(c));
                s.value.push_back(static_cast<double>(bin) / top);
            }
        }
        s.offsets.push_back(s.index.size());
    }
    return s;
}

SparseDesign to_sparse(std::span<const FeatureVector> rows)
{
    SparseDesign s;
    s.cols = rows.empty() ? 0 : rows.front().values.size();
    for (const auto& row : rows) {
        if (row.values.size() != s.cols) {
            throw std::invalid_argument("train: ragged feature vectors");
        }
        for (std::size_t c = 0; c < row.values.size(); ++c) {
            if (row.values[c] != 0.0) {
                s.index.push_back(static_cast<std::uint32_t>(c));
                s.value.push_back(row.values[c]);
            }
        }
        s.offsets.push_back(s.index.size());
    }
    return s;
}

double softplus(double z)
{
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// kClasses == 0 selects the runtime class count; fixed counts let the
// compiler unroll the per-class loops.
template <std::size_t kClasses>
void run_epoch(const SparseDesign& x, std::span<const std::uint8_t> labels,
               std::span<const std::size_t> order, ReadoutWeights& w, double lr, double* loss_sum)
{
    const std::size_t nc = kClasses == 0 ? w.n_classes : kClasses;
    std::vector<double> z(nc);
    std::vector<double> g(nc);
    double* weights = w.w.data();
    const bool bias = w.has_bias();

    for (std::size_t s : order) {
        const std::size_t begin = x.offsets[s];
        const std::size_t end = x.offsets[s + 1];
        for (std::size_t c = 0; c < nc; ++c) {
            z[c] = bias ? w.bias[c] : 0.0;
        }
        for (std::size_t j = begin; j < end; ++j) {
            const double v = x.value[j];
            const double* row = weights + static_cast<std::size_t>(x.index[j]) * nc;
            for (std::size_t c = 0; c < nc; ++c) {
                z[c] += v * row[c];
            }
        }
        const std::size_t label = labels[s];
        for (std::size_t c = 0; c < nc; ++c) {
            const double target = c == label ? 1.0 : 0.0;
            g[c] = lr * (sigmoid(z[c]) - target);
            if (loss_sum != nullptr) {
                *loss_sum += c == label ? softplus(-z[c]) : softplus(z[c]);
            }
        }
        for (std::size_t j = begin; j < end; ++j) {
            const double v = x.value[j];
            double* row = weights + static_cast<std::size_t>(x.index[j]) * nc;
            for (std::size_t c = 0; c < nc; ++c) {
                row[c] -= v * g[c];
            }
        }
        if (bias) {
            for (std::size_t c = 0; c < nc; ++c) {
                w.bias[c] -= g[c];
            }
        }
    }
}

TrainResult train_sparse(const SparseDesign& x, std::span<const std::uint8_t> labels,
                         ReadoutWeights w, const TrainConfig& cfg)
{
    cfg.validate();
    if (x.rows() == 0) {
        throw std::invalid_argument("train: empty batch");
    }
    if (labels.size() != x.rows()) {
        throw std::invalid_argument("train: feature/label count mismatch");
    }
    if (w.n_features != x.cols || w.w.size() != w.n_features * w.n_classes) {
        throw std::invalid_argument("train: weight shape does not match feature length");
    }
    for (std::uint8_t y : labels) {
        if (y >= w.n_classes) {
            throw std::invalid_argument("train: label out of range");
        }
    }
    if (cfg.bias && !w.has_bias()) {
        w.bias.assign(w.n_classes, 0.0);
    }

    TrainResult result;
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_key({cfg.seed, stream_tag::shuffle}));

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        double loss = 0.0;
        double* loss_ptr = cfg.track_loss ? &loss : nullptr;
        if (w.n_classes == 10) {
            run_epoch<10>(x, labels, order, w, cfg.learning_rate, loss_ptr);
        } else {
            run_epoch<0>(x, labels, order, w, cfg.learning_rate, loss_ptr);
        }
        if (cfg.track_loss) {
            result.epoch_loss.push_back(loss / static_cast<double>(x.rows()));
        }
    }
    result.weights = std::move(w);
    return result;
}

void check_shape(const ReadoutWeights& w, std::span<const double> features)
{
    if (features.size() != w.n_features) {
        throw std::invalid_argument("readout: feature length " + std::to_string(features.size()) +
                                    " does not match weights (" + std::to_string(w.n_features) + ")");
    }
}

} // namespace

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    }
}

ReadoutWeights init_weights(std::size_t n_features, std::size_t n_classes, std::uint64_t seed,
                            bool with_bias)
{
    if (n_features == 0 || n_classes == 0) {
        throw std::invalid_argument("init_weights: empty shape");
    }
    ReadoutWeights w;
    w.n_features = n_features;
    w.n_classes = n_classes;
    w.w.resize(n_features * n_classes);
    std::mt19937_64 rng(derive_key({seed, stream_tag::weights}));
    for (double& v : w.w) {
        v = -0.01 + 0.02 * uniform01(rng);
    }
    if (with_bias) {
        w.bias.assign(n_classes, 0.0);
    }
    return w;
}

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> softmax(std::span<const double> logits)
{
    std::vector<double> p(logits.begin(), logits.end());
    if (p.empty()) {
        return p;
    }
    const double shift = *std::max_element(p.begin(), p.end());
    double total = 0.0;
    for (double& v : p) {
        v = std::exp(v - shift);
        total += v;
    }
    for (double& v : p) {
        v /= total;
    }
    return p;
}

std::vector<double> logits(const ReadoutWeights& w, std::span<const double> features)
{
    check_shape(w, features);
    std::vector<double> z(w.n_classes, 0.0);
    if (w.has_bias()) {
        z = w.bias;
    }
    for (std::size_t f = 0; f < w.n_features; ++f) {
        const double v = features[f];
        if (v == 0.0) {
            continue;
        }
        for (std::size_t c = 0; c < w.n_classes; ++c) {
            z[c] += v * w.at(f, c);
        }
    }
    return z;
}

double sample_loss(const ReadoutWeights& w, std::span<const double> features, std::size_t label)
{
    const std::vector<double> z = logits(w, features);
    double loss = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        loss += c == label ? softplus(-z[c]) : softplus(z[c]);
    }
    return loss;
}

ReadoutWeights loss_gradient(const ReadoutWeights& w, std::span<const double> features,
                             std::size_t label)
{
    const std::vector<double> z = logits(w, features);
    ReadoutWeights g = w;
    for (std::size_t c = 0; c < w.n_classes; ++c) {
        const double err = sigmoid(z[c]) - (c == label ? 1.0 : 0.0);
        for (std::size_t f = 0; f < w.n_features; ++f) {
            g.at(f, c) = features[f] * err;
        }
        if (g.has_bias()) {
            g.bias[c] = err;
        }
    }
    return g;
}

TrainResult train(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                  ReadoutWeights w0, const TrainConfig& cfg)
{
    return train_sparse(to_sparse(features), labels, std::move(w0), cfg);
}

TrainResult train(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels,
                  ReadoutWeights w0, const TrainConfig& cfg)
{
    return train_sparse(to_sparse(features), labels, std::move(w0), cfg);
}

std::size_t predict(const ReadoutWeights& w, std::span<const double> features)
{
    const std::vector<double> p = softmax(logits(w, features));
    // max_element returns the first maximum, i.e. the lowest class index.
    return static_cast<std::size_t>(std::distance(p.begin(), std::max_element(p.begin(), p.end())));
}

std::vector<std::uint8_t> predict_all(const ReadoutWeights& w, const FeatureMatrix& features)
{
    std::vector<std::uint8_t> out(features.rows);
    std::vector<double> row(features.cols);
    for (std::size_t r = 0; r < features.rows; ++r) {
        for (std::size_t c = 0; c < features.cols; ++c) {
            row[c] = features.value(r, c);
        }
        out[r] = static_cast<std::uint8_t>(predict(w, row));
    }
    return out;
}

double evaluate(const ReadoutWeights& w, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels)
{
    if (features.rows == 0 || labels.size() != features.rows) {
        throw std::invalid_argument("evaluate: empty dataset or label count mismatch");
    }
    const std::vector<std::uint8_t> pred = predict_all(w, features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        correct += pred[i] == labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double evaluate(const ReadoutWeights& w, std::span<const FeatureVector> features,
                std::span<const std::uint8_t> labels)
{
    if (features.empty() || labels.size() != features.size()) {
        throw std::invalid_argument("evaluate: empty dataset or label count mismatch");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        correct += predict(w, features[i].values) == labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(features.size());
}

void save_checkpoint(const std::filesystem::path& path, const ReadoutWeights& w, std::uint64_t seed,
                     const std::string& config_hash)
{
    static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    }
    out << "pdfn-readout v1 " << w.n_features << ' ' << w.n_classes << ' ' << (w.has_bias() ? 1 : 0)
        << ' ' << seed << ' ' << (config_hash.empty() ? "-" : config_hash) << '\n';
    out.write(reinterpret_cast<const char*>(w.w.data()),
              static_cast<std::streamsize>(w.w.size() * sizeof(double)));
    if (w.has_bias()) {
        out.write(reinterpret_cast<const char*>(w.bias.data()),
                  static_cast<std::streamsize>(w.bias.size() * sizeof(double)));
    }
    if (!out) {
        throw std::runtime_error("save_checkpoint: write failed for " + path.string());
    }
}

ReadoutWeights load_checkpoint(const std::filesystem::path& path, CheckpointHeader* header)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);
    std::istringstream hs(line);
    std::string magic, version;
    CheckpointHeader h;
    int bias = 0;
    hs >> magic >> version >> h.n_features >> h.n_classes >> bias >> h.seed >> h.config_hash;
    if (!hs || magic != "pdfn-readout" || version != "v1") {
        throw std::runtime_error("load_checkpoint: bad header in " + path.string());
    }
    h.has_bias = bias != 0;
    ReadoutWeights w;
    w.n_features = h.n_features;
    w.n_classes = h.n_classes;
    w.w.resize(h.n_features * h.n_classes);
    in.read(reinterpret_cast<char*>(w.w.data()), static_cast<std::streamsize>(w.w.size() * sizeof(double)));
    if (h.has_bias) {
        w.bias.resize(h.n_classes);
        in.read(reinterpret_cast<char*>(w.bias.data()),
                static_cast<std::streamsize>(w.bias.size() * sizeof(double)));
    }
    if (!in) {
        throw std::runtime_error("load_checkpoint: truncated payload in " + path.string());
    }
    if (header != nullptr) {
        *header = h;
    }
    return w;
}

} // namespace pdfn
