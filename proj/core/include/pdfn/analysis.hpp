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
#include "pdfn/reservoir.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdfn {

/// Final state of one noise-free device for every binary program of length
/// seq_len and every tau. Row r is the program whose bits spell r with the
/// first pulse as the most significant bit.
struct SeparabilityTable {
    std::size_t seq_len = 0;
    std::vector<double> tau_grid; // s
    std::vector<double> states;   // (2^seq_len) x tau_grid.size(), row-major

    std::size_t sequences() const { return std::size_t{1} << seq_len; }
    double at(std::size_t sequence, std::size_t tau_index) const
    {
        return states[sequence * tau_grid.size() + tau_index];
    }
};

/// Bits of program `id`, first pulse first.
PulseProgram sequence_program(std::uint64_t id, std::size_t length);

/// Throws std::invalid_argument when length == 0, length > 20 or the grid is empty.
SeparabilityTable final_state_sweep(std::size_t length, std::span<const double> tau_grid,
                                    const DeviceParams& params, double v_write = 1.5);

/// Number of values that sit alone in their ADC bin.
std::size_t unique_bins(std::span<const double> currents, const QuantizerConfig& q);

struct OccupancyCell {
    double tau = 0.0; // s
    int bits = 1;
    std::size_t unique_states = 0; // states in a bin shared with no other state
    std::size_t occupied_bins = 0;
};

/// Quantises every final state with the default (reachable-range) ADC for
/// programs of the table's length. Cells are ordered tau-major.
std::vector<OccupancyCell> bin_occupancy(const SeparabilityTable& table, std::span<const int> bits_grid,
                                         const DeviceParams& params, double v_read = 0.6,
                                         double v_write = 1.5);

/// Per tau: the largest max-min spread of final x among programs with the
/// same number of ones.
std::vector<double> popcount_spread(const SeparabilityTable& table);

inline constexpr int kRecordSchemaVersion = 1;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepRecord {
    Dimension dimension = Dimension::TwoD;
    bool parity = true;
    std::size_t sections = 1;
    int bits = 1;
    double tau_ns = 0.0;
    double variability_pct = 0.0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    std::optional<double> runtime_s; // left empty unless runtime recording is on
    std::string config_hash;
    int schema_version = kRecordSchemaVersion;
};

/// dimension,parity,sections,bits,tau_ns,variability_pct,seed,accuracy,runtime_s,config_hash,schema_version
std::string records_header();
std::string format_record(const SweepRecord& r);
void write_records_csv(std::ostream& out, std::span<const SweepRecord> records);

/// Reads a records CSV. Throws SchemaError when the header or a row's schema
/// version differs from kRecordSchemaVersion, std::runtime_error on
/// malformed rows.
std::vector<SweepRecord> read_records_csv(std::istream& in, const std::string& origin = "<stream>");

struct LevelMean {
    std::string level;
    double mean = 0.0;
    std::size_t count = 0;
};

struct FactorEffect {
    std::string factor;
    std::vector<LevelMean> levels; // ascending level order
    double span = 0.0;             // max level mean - min level mean
};

/// Group means for every factor, ranked by span (largest first; ties keep
/// the column order). Throws std::invalid_argument on empty input.
std::vector<FactorEffect> main_effects(std::span<const SweepRecord> records);

/// factor,rank,level,count,mean_accuracy,span
void write_effects_csv(std::ostream& out, std::span<const FactorEffect> effects);
/// tau_ns,sequence_id,sequence,final_x
void write_separability_csv(std::ostream& out, const SeparabilityTable& table);
/// tau_ns,bits,unique_states,occupied_bins
void write_occupancy_csv(std::ostream& out, std::span<const OccupancyCell> cells);

} // namespace pdfn
