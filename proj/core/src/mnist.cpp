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

#include "pdfn/mnist.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace pdfn {

namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path)
{
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
        throw IdxFormatError("truncated IDX header in " + path.string());
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::ifstream open_binary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::string hex(std::uint32_t v)
{
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

} // namespace

std::vector<GrayImage> read_idx_images(const std::filesystem::path& path)
{
    std::ifstream in = open_binary(path);
    const std::uint32_t magic = read_be32(in, path);
    if (magic != kIdxImagesMagic) {
        throw IdxFormatError("bad IDX image magic " + hex(magic) + " in " + path.string());
    }
    const std::uint32_t count = read_be32(in, path);
    const std::uint32_t rows = read_be32(in, path);
    const std::uint32_t cols = read_be32(in, path);
    if (rows == 0 || cols == 0) {
        throw IdxFormatError("zero image dimension in " + path.string());
    }
    std::vector<GrayImage> images(count);
    const std::size_t pixels = std::size_t{rows} * cols;
    for (auto& img : images) {
        img.rows = rows;
        img.cols = cols;
        img.pixels.resize(pixels);
        if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(pixels))) {
            throw IdxFormatError("truncated IDX image payload in " + path.string());
        }
    }
    return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path)
{
    std::ifstream in = open_binary(path);
    const std::uint32_t magic = read_be32(in, path);
    if (magic != kIdxLabelsMagic) {
        throw IdxFormatError("bad IDX label magic " + hex(magic) + " in " + path.string());
    }
    const std::uint32_t count = read_be32(in, path);
    std::vector<std::uint8_t> labels(count);
    if (!in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(count))) {
        throw IdxFormatError("truncated IDX label payload in " + path.string());
    }
    return labels;
}

LabeledImages load_mnist(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path)
{
    LabeledImages out{read_idx_images(images_path), read_idx_labels(labels_path)};
    if (out.images.size() != out.labels.size()) {
        throw DatasetConsistencyError(images_path.string() + " holds " +
                                      std::to_string(out.images.size()) + " images but " +
                                      labels_path.string() + " holds " +
                                      std::to_string(out.labels.size()) + " labels");
    }
    for (std::uint8_t y : out.labels) {
        if (y > 9) {
            throw DatasetConsistencyError("label " + std::to_string(y) + " outside 0..9 in " +
                                          labels_path.string());
        }
    }
    return out;
}

Dataset load_mnist_dir(const std::filesystem::path& dir)
{
    return Dataset{load_mnist(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte"),
                   load_mnist(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte")};
}

void write_idx_images(const std::filesystem::path& path, const std::vector<GrayImage>& images)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    const std::uint32_t rows = images.empty() ? 0 : static_cast<std::uint32_t>(images.front().rows);
    const std::uint32_t cols = images.empty() ? 0 : static_cast<std::uint32_t>(images.front().cols);
    write_be32(out, kIdxImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(images.size()));
    write_be32(out, rows);
    write_be32(out, cols);
    for (const auto& img : images) {
        if (img.rows != rows || img.cols != cols) {
            throw std::invalid_argument("write_idx_images: images differ in shape");
        }
        out.write(reinterpret_cast<const char*>(img.pixels.data()),
                  static_cast<std::streamsize>(img.pixels.size()));
    }
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_be32(out, kIdxLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

} // namespace pdfn
