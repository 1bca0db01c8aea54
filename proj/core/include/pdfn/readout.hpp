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

#pragma once

// Logistic-regression readout.
//
// Training minimises the summed per-class binary cross-entropy of an
// element-wise sigmoid against one-hot targets with per-sample SGD.
// Inference takes the argmax of a softmax over the same logits.

#include "pdfn/reservoir.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pdfn {

struct ReadoutWeights {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> w;    // row-major, n_features x n_classes
    std::vector<double> bias; // n_classes entries, or empty when unused

    double& at(std::size_t f, std::size_t c) { return w[f * n_classes + c]; }
    double at(std::size_t f, std::size_t c) const { return w[f * n_classes + c]; }
    bool has_bias() const { return !bias.empty(); }
};

struct TrainConfig {
    std::size_t epochs = 500;
    double learning_rate = 0.02;
    std::uint64_t seed = 0;
    bool shuffle = true;
    bool bias = true; // per-class offset; off reproduces a weights-only readout
    bool track_loss = false; // record the mean per-sample loss of every epoch

    void validate() const;
};

struct TrainResult {
    ReadoutWeights weights;
    std::vector<double> epoch_loss; // filled only with track_loss
};

/// Entries i.i.d. uniform in [-0.01, 0.01]; bias (if requested) starts at 0.
ReadoutWeights init_weights(std::size_t n_features, std::size_t n_classes, std::uint64_t seed,
                            bool with_bias = false);

double sigmoid(double z);
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> logits(const ReadoutWeights& w, std::span<const double> features);

/// Summed binary cross-entropy of sigmoid(logits) against one-hot(label).
double sample_loss(const ReadoutWeights& w, std::span<const double> features, std::size_t label);

/// d(sample_loss)/dw, shaped like `w` (bias gradient included when present).
ReadoutWeights loss_gradient(const ReadoutWeights& w, std::span<const double> features,
                             std::size_t label);

/// Per-sample SGD. Sample order is reshuffled every epoch from cfg.seed.
/// Throws std::invalid_argument on shape or label mismatches.
TrainResult train(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                  ReadoutWeights w0, const TrainConfig& cfg);
TrainResult train(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels,
                  ReadoutWeights w0, const TrainConfig& cfg);

/// argmax of softmax(w^T f); ties go to the lowest class index.
std::size_t predict(const ReadoutWeights& w, std::span<const double> features);

double evaluate(const ReadoutWeights& w, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels);
double evaluate(const ReadoutWeights& w, std::span<const FeatureVector> features,
                std::span<const std::uint8_t> labels);

/// Predictions for every row of `features`.
std::vector<std::uint8_t> predict_all(const ReadoutWeights& w, const FeatureMatrix& features);

/// Checkpoint: one text header line
///   "pdfn-readout v1 <n_features> <n_classes> <has_bias> <seed> <config_hash>\n"
/// followed by the weights (then bias) as little-endian IEEE-754 doubles.
struct CheckpointHeader {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    bool has_bias = false;
    std::uint64_t seed = 0;
    std::string config_hash;
};

void save_checkpoint(const std::filesystem::path& path, const ReadoutWeights& w, std::uint64_t seed,
                     const std::string& config_hash);
ReadoutWeights load_checkpoint(const std::filesystem::path& path, CheckpointHeader* header = nullptr);

} // namespace pdfn
