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

// Image to pulse-train encoding.
//
// A binarized image is cut into row sequences (and, in 2D, column sequences),
// optionally augmented with XOR "parity" rows of adjacent row pairs. Every
// sequence is split into k contiguous sections and each section drives one
// device. Program order is fixed:
//
//   1. row sections        (row 0..n-1, section 0..k-1)
//   2. column sections     (2D only; column 0..m-1, section 0..k-1)
//   3. parity-row sections (parity only; parity row 0..n-2, section 0..k-1)

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdfn {

struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels; // row-major, 0..255

    std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

struct BinaryImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits; // row-major, 0 or 1

    std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
};

enum class Dimension { OneD, TwoD };

std::string to_string(Dimension d);
Dimension parse_dimension(const std::string& text);

struct EncodingConfig {
    Dimension dimension = Dimension::TwoD;
    bool parity = true;
    std::size_t sections = 7;
    int binarize_threshold = 128;

    /// Throws std::invalid_argument unless 1 <= sections <= min(rows, cols)
    /// and the threshold is within [0, 255].
    void validate(std::size_t rows, std::size_t cols) const;
};

using PulseProgram = std::vector<std::uint8_t>;

struct PulseProgramSet {
    std::vector<PulseProgram> programs;
    std::size_t max_len = 0;
};

/// bit = 1 iff pixel >= threshold.
BinaryImage binarize(const GrayImage& img, int threshold);

/// XOR of each pair of adjacent rows; n-1 rows of m bits.
/// Throws std::domain_error for images with fewer than two rows.
std::vector<std::vector<std::uint8_t>> parity_rows(const BinaryImage& img);

/// Contiguous ceil-split of `seq` into k parts. Section i covers
/// [i*ceil(m/k), min((i+1)*ceil(m/k), m)); trailing parts may be short or empty.
/// Throws std::domain_error when k == 0 or k > m.
std::vector<PulseProgram> section(std::span<const std::uint8_t> seq, std::size_t k);

PulseProgramSet encode(const BinaryImage& img, const EncodingConfig& cfg);

/// Device count, time steps until read, and total pulse slots (pixels written).
std::size_t reservoir_size(const EncodingConfig& cfg, std::size_t rows, std::size_t cols);
std::size_t latency(const EncodingConfig& cfg, std::size_t rows, std::size_t cols);
std::size_t write_count(const EncodingConfig& cfg, std::size_t rows, std::size_t cols);

} // namespace pdfn
