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

#include "pdfn/device.hpp"
#include "pdfn/encoding.hpp"
#include "pdfn/readout.hpp"
#include "pdfn/reservoir.hpp"
#include "pdfn/variability.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pdfn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// How the ADC full-scale range is chosen.
enum class QuantizerRange {
    Reachable, // [I(x_min), I(after `latency` consecutive writes)]
    Full,      // [I(x_min), I(x_max)]
};

std::string to_string(QuantizerRange r);
QuantizerRange parse_quantizer_range(const std::string& text);

/// Everything that determines one experiment. Paths and thread count do not
/// influence results and are excluded from hash().
struct ExperimentConfig {
    EncodingConfig encoding;
    DeviceParams device;
    double v_write = 1.5;
    double v_read = 0.6;
    int bits = 4;
    QuantizerRange range = QuantizerRange::Reachable;
    TrainConfig train;
    std::size_t train_limit = 0; // 0 = the whole training split
    VariabilityConfig variability;
    std::uint64_t seed = 0;

    std::filesystem::path data_dir;
    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir; // empty = no feature cache
    bool save_checkpoint = true;
    bool record_runtime = false;
    unsigned threads = 1;

    /// Throws ConfigError for inconsistent settings, for an image of
    /// rows x cols pixels.
    void validate(std::size_t rows = 28, std::size_t cols = 28) const;

    QuantizerConfig quantizer(std::size_t rows = 28, std::size_t cols = 28) const;

    /// Canonical text of every result-affecting field, one "key=value" per line.
    std::string canonical() const;
    /// 16 hex digits (FNV-1a 64) of canonical().
    std::string hash() const;
    /// Same, restricted to the fields that determine reservoir features.
    std::string feature_hash(std::size_t run) const;

    double variability_pct() const;
};

/// Axes of a factor sweep; every combination is one grid point.
struct SweepGrid {
    std::vector<Dimension> dimension;
    std::vector<bool> parity;
    std::vector<std::size_t> sections;
    std::vector<int> bits;
    std::vector<double> tau_ns;
    std::vector<double> variability_pct; // sets both d2d and c2c, in percent
    std::vector<std::uint64_t> seeds;

    std::size_t size() const;
};

/// Parses a TOML document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& toml_text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses the optional [grid] table of a sweep file.
SweepGrid parse_grid(const std::string& toml_text, const std::string& origin = "<string>");
SweepGrid load_grid(const std::filesystem::path& path);

/// Cartesian product of `grid` over `base`; axes left empty keep the base value.
std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base, const SweepGrid& grid);

std::string fnv1a_hex(const std::string& text);

} // namespace pdfn
