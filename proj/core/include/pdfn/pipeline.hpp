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

// End-to-end experiment: binarize -> encode -> reservoir -> quantize ->
// train readout -> evaluate.

#include "pdfn/analysis.hpp"
#include "pdfn/config.hpp"
#include "pdfn/mnist.hpp"
#include "pdfn/readout.hpp"
#include "pdfn/variability.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdfn {

/// A pipeline failure tagged with the stage that raised it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage))
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Sorted indices of the first `limit` entries of a seeded permutation of
/// 0..n-1; all indices when limit is 0 or >= n. A smaller limit always
/// yields a subset of a larger one.
std::vector<std::size_t> training_subset(std::size_t n, std::size_t limit, std::uint64_t seed);

struct FeatureSet {
    FeatureMatrix train; // rows follow training_subset order
    FeatureMatrix test;
};

/// Cycle-noise key of test image i; training image i uses key i.
inline constexpr std::uint64_t kTestImageKeyBase = std::uint64_t{1} << 32;

/// Reservoir features of Monte-Carlo run `run` (device factors and cycle
/// noise both depend on it). Reads and fills cfg.cache_dir when set.
FeatureSet build_features(const ExperimentConfig& cfg, const Dataset& data, std::size_t run = 0);

using ConfusionMatrix = std::array<std::array<std::size_t, 10>, 10>; // [true][predicted]

struct PipelineResult {
    double test_accuracy = 0.0;
    ReadoutWeights weights;
    ConfusionMatrix confusion{};
    SweepRecord record;
    double runtime_s = 0.0;
};

/// Throws StageError naming the failing stage.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const Dataset& data, std::size_t run = 0);

SweepRecord make_record(const ExperimentConfig& cfg, double accuracy);

/// Writes records.csv, confusion.csv and (if enabled) readout.ckpt to cfg.output_dir.
void write_run_outputs(const ExperimentConfig& cfg, const PipelineResult& result);

/// Retrains the readout on every run's reservoir; the readout seed is shared.
MonteCarloStats monte_carlo(const ExperimentConfig& cfg, const Dataset& data);

struct SweepFailure {
    std::size_t index = 0;
    std::string config_hash;
    std::string message;
};

struct SweepOutcome {
    std::vector<SweepRecord> records;
    std::vector<SweepFailure> failures;
};

/// Runs every grid point in order. A failing point is reported and skipped.
/// Callbacks fire as soon as each point finishes.
SweepOutcome factor_sweep(std::span<const ExperimentConfig> grid, const Dataset& data,
                          const std::function<void(const SweepRecord&)>& on_record = {},
                          const std::function<void(const SweepFailure&)>& on_failure = {});

} // namespace pdfn
