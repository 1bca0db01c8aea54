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

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace pdfn {

/// SplitMix64 generator. Used for cheap, independent substreams keyed by
/// (seed, run, image, device) tuples; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Hashes an ordered tuple of integers into a single 64-bit stream key.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t key = 0x6A09E667F3BCC909ULL;
    for (std::uint64_t p : parts) {
        SplitMix64 mixer(key ^ p);
        key = mixer() + 0x9E3779B97F4A7C15ULL * (p + 1);
        key = SplitMix64(key)();
    }
    return key;
}

/// Uniform double in [0, 1) with 53 random bits.
template <typename Engine>
double uniform01(Engine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Stream tags so that different consumers of the master seed never collide.
namespace stream_tag {
inline constexpr std::uint64_t weights = 1;
inline constexpr std::uint64_t shuffle = 2;
inline constexpr std::uint64_t subset = 3;
inline constexpr std::uint64_t device = 4;
inline constexpr std::uint64_t cycle = 5;
} // namespace stream_tag

} // namespace pdfn
