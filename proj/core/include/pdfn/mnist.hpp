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

// IDX (MNIST) reader/writer. All header integers are big-endian uint32:
//   images: magic 0x00000803, count, rows, cols, then count*rows*cols bytes
//   labels: magic 0x00000801, count, then count bytes

#include "pdfn/encoding.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace pdfn {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

class IdxFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DatasetConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabeledImages {
    std::vector<GrayImage> images;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return images.size(); }
};

struct Dataset {
    LabeledImages train;
    LabeledImages test;
};

std::vector<GrayImage> read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

/// Loads one split; throws DatasetConsistencyError when the counts differ or a
/// label is outside 0..9.
LabeledImages load_mnist(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path);

/// Loads the four standard files (train-images-idx3-ubyte, ...) from `dir`.
Dataset load_mnist_dir(const std::filesystem::path& dir);

void write_idx_images(const std::filesystem::path& path, const std::vector<GrayImage>& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

} // namespace pdfn
