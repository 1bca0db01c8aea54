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

// Parallel bank of uncoupled memristors plus the ADC that digitises their
// read currents.

#include "pdfn/device.hpp"
#include "pdfn/encoding.hpp"
#include "pdfn/variability.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pdfn {

struct QuantizerConfig {
    int bits = 4;
    double i_lo = 0.0;
    double i_hi = 1.0;

    void validate() const;
    std::uint32_t levels() const { return 1u << bits; }
};

/// Current range of a device over its whole state interval [x_min, x_max].
std::pair<double, double> full_device_range(const DeviceParams& params, double v_read);

/// Current range reachable within `steps` pulses from rest: from I(x_min) to
/// the current after `steps` consecutive writes (the all-'1' program, which
/// maximises x because a write never yields less than a decay).
std::pair<double, double> reachable_range(const DeviceParams& params, double v_read, double v_write,
                                          std::size_t steps);

/// ADC bin: clamp(floor((I - i_lo) / (i_hi - i_lo) * 2^bits), 0, 2^bits - 1).
std::uint32_t quantize_bin(double current, const QuantizerConfig& q);

struct FeatureVector {
    std::vector<double> values; // bin / (2^bits - 1), in [0, 1]
};

FeatureVector quantize(std::span<const double> currents, const QuantizerConfig& q);

/// Quantised features for a batch of images, stored as bin indices.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int bits = 1;
    std::vector<std::uint16_t> bins; // row-major

    double value(std::size_t r, std::size_t c) const
    {
        return static_cast<double>(bins[r * cols + c]) / static_cast<double>((1u << bits) - 1);
    }
    FeatureVector row(std::size_t r) const;
};

class Reservoir {
public:
    /// Nominal devices, all starting at x_min.
    Reservoir(const DeviceParams& params, std::size_t device_count, double v_write = 1.5,
              double v_read = 0.6);
    /// One device per entry of `factors`.
    Reservoir(const DeviceParams& params, const std::vector<DeviceFactors>& factors,
              double v_write = 1.5, double v_read = 0.6);

    std::size_t size() const { return devices_.size(); }
    const DeviceParams& params() const { return params_; }
    double v_write() const { return v_write_; }
    double v_read() const { return v_read_; }

    /// Drives every device through its program from its initial state
    /// (bit 1 -> v_write, bit 0 -> 0 V), pads with decay steps up to
    /// programs.max_len and returns the read currents in program order.
    /// `image` keys the cycle-noise substreams. Throws std::invalid_argument
    /// on a program/device count mismatch.
    std::vector<double> run(const PulseProgramSet& programs, const CycleNoiseFactory& noise = {},
                            std::uint64_t image = 0) const;

private:
    DeviceParams params_;
    std::vector<Memristor> devices_;
    double v_write_;
    double v_read_;
    ReadLine read_;
};

/// Encodes, runs and quantises every image. Image i uses cycle-noise key
/// `image_key_base + i`. Output is independent of `threads`.
FeatureMatrix extract_features(std::span<const GrayImage> images, const EncodingConfig& enc,
                               const Reservoir& reservoir, const QuantizerConfig& q,
                               const CycleNoiseFactory& noise = {}, std::uint64_t image_key_base = 0,
                               unsigned threads = 1);

} // namespace pdfn
