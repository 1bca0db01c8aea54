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

#include "pdfn/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdfn {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b)
{
    return (a + b - 1) / b;
}

void append_sections(std::span<const std::uint8_t> seq, std::size_t k, PulseProgramSet& out)
{
    for (auto& part : section(seq, k)) {
        out.programs.push_back(std::move(part));
    }
}

} // namespace

std::string to_string(Dimension d)
{
    return d == Dimension::OneD ? "1D" : "2D";
}

Dimension parse_dimension(const std::string& text)
{
    if (text == "1D" || text == "1d") {
        return Dimension::OneD;
    }
    if (text == "2D" || text == "2d") {
        return Dimension::TwoD;
    }
    throw std::invalid_argument("unknown dimension '" + text + "' (expected 1D or 2D)");
}

void EncodingConfig::validate(std::size_t rows, std::size_t cols) const
{
    if (sections == 0 || sections > std::min(rows, cols)) {
        throw std::invalid_argument("EncodingConfig: sections=" + std::to_string(sections) +
                                    " outside [1, min(rows, cols)]");
    }
    if (binarize_threshold < 0 || binarize_threshold > 255) {
        throw std::invalid_argument("EncodingConfig: binarize_threshold outside [0, 255]");
    }
    if (parity && rows < 2) {
        throw std::invalid_argument("EncodingConfig: parity needs at least two rows");
    }
}

BinaryImage binarize(const GrayImage& img, int threshold)
{
    BinaryImage out{img.rows, img.cols, std::vector<std::uint8_t>(img.pixels.size())};
    std::transform(img.pixels.begin(), img.pixels.end(), out.bits.begin(),
                   [threshold](std::uint8_t p) { return static_cast<std::uint8_t>(p >= threshold); });
    return out;
}

std::vector<std::vector<std::uint8_t>> parity_rows(const BinaryImage& img)
{
    if (img.rows < 2) {
        throw std::domain_error("parity_rows: image needs at least two rows");
    }
    std::vector<std::vector<std::uint8_t>> out(img.rows - 1, std::vector<std::uint8_t>(img.cols));
    for (std::size_t r = 0; r + 1 < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            out[r][c] = img.at(r, c) ^ img.at(r + 1, c);
        }
    }
    return out;
}

std::vector<PulseProgram> section(std::span<const std::uint8_t> seq, std::size_t k)
{
    if (k == 0 || k > seq.size()) {
        throw std::domain_error("section: need 1 <= k <= sequence length");
    }
    const std::size_t len = ceil_div(seq.size(), k);
    std::vector<PulseProgram> parts(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t begin = std::min(i * len, seq.size());
        const std::size_t end = std::min(begin + len, seq.size());
        parts[i].assign(seq.begin() + static_cast<std::ptrdiff_t>(begin),
                        seq.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return parts;
}

PulseProgramSet encode(const BinaryImage& img, const EncodingConfig& cfg)
{
    cfg.validate(img.rows, img.cols);
    const std::size_t n = img.rows;
    const std::size_t m = img.cols;
    const std::span<const std::uint8_t> bits(img.bits);

    PulseProgramSet out;
    out.programs.reserve(reservoir_size(cfg, n, m));
    for (std::size_t r = 0; r < n; ++r) {
        append_sections(bits.subspan(r * m, m), cfg.sections, out);
    }
    if (cfg.dimension == Dimension::TwoD) {
        std::vector<std::uint8_t> column(n);
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t r = 0; r < n; ++r) {
                column[r] = img.at(r, c);
            }
            append_sections(column, cfg.sections, out);
        }
    }
    if (cfg.parity) {
        for (const auto& row : parity_rows(img)) {
            append_sections(row, cfg.sections, out);
        }
    }
    out.max_len = latency(cfg, n, m);
    return out;
}

std::size_t reservoir_size(const EncodingConfig& cfg, std::size_t rows, std::size_t cols)
{
    std::size_t sequences = rows;
    if (cfg.dimension == Dimension::TwoD) {
        sequences += cols;
    }
    if (cfg.parity) {
        sequences += rows - 1;
    }
    return sequences * cfg.sections;
}

std::size_t latency(const EncodingConfig& cfg, std::size_t rows, std::size_t cols)
{
    const std::size_t row_len = ceil_div(cols, cfg.sections);
    if (cfg.dimension == Dimension::OneD) {
        return row_len;
    }
    return std::max(row_len, ceil_div(rows, cfg.sections));
}

std::size_t write_count(const EncodingConfig& cfg, std::size_t rows, std::size_t cols)
{
    std::size_t writes = rows * cols;
    if (cfg.dimension == Dimension::TwoD) {
        writes += rows * cols;
    }
    if (cfg.parity) {
        writes += (rows - 1) * cols;
    }
    return writes;
}

} // namespace pdfn
