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

#include "pdfn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace pdfn {

void QuantizerConfig::validate() const
{
    if (bits < 1 || bits > 16) {
        throw std::invalid_argument("QuantizerConfig: bits must lie in [1, 16]");
    }
    if (!(i_lo < i_hi)) {
        throw std::invalid_argument("QuantizerConfig: i_lo must be below i_hi");
    }
}

std::pair<double, double> full_device_range(const DeviceParams& params, double v_read)
{
    const ReadLine line = read_line(v_read, params);
    return {line.current(params.x_min), line.current(params.x_max)};
}

std::pair<double, double> reachable_range(const DeviceParams& params, double v_read, double v_write,
                                          std::size_t steps)
{
    const ReadLine line = read_line(v_read, params);
    Memristor dev(params, MemristorState::nominal(params), v_write);
    for (std::size_t i = 0; i < steps; ++i) {
        dev.apply(true);
    }
    const double lo = line.current(params.x_min);
    const double hi = line.current(dev.x());
    if (!(hi > lo)) {
        // Zero-length programs: fall back to the full range so the ADC stays valid.
        return full_device_range(params, v_read);
    }
    return {lo, hi};
}

std::uint32_t quantize_bin(double current, const QuantizerConfig& q)
{
    const double levels = static_cast<double>(q.levels());
    const double scaled = std::floor((current - q.i_lo) / (q.i_hi - q.i_lo) * levels);
    return static_cast<std::uint32_t>(std::clamp(scaled, 0.0, levels - 1.0));
}

FeatureVector quantize(std::span<const double> currents, const QuantizerConfig& q)
{
    q.validate();
    FeatureVector f;
    f.values.reserve(currents.size());
    const double top = static_cast<double>(q.levels() - 1);
    for (double c : currents) {
        f.values.push_back(static_cast<double>(quantize_bin(c, q)) / top);
    }
    return f;
}

FeatureVector FeatureMatrix::row(std::size_t r) const
{
    FeatureVector f;
    f.values.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        f.values.push_back(value(r, c));
    }
    return f;
}

Reservoir::Reservoir(const DeviceParams& params, std::size_t device_count, double v_write,
                     double v_read)
    : Reservoir(params, std::vector<DeviceFactors>(device_count, DeviceFactors{params.x_min, params.tau}),
                v_write, v_read)
{
}

Reservoir::Reservoir(const DeviceParams& params, const std::vector<DeviceFactors>& factors,
                     double v_write, double v_read)
    : params_(params), v_write_(v_write), v_read_(v_read), read_(read_line(v_read, params))
{
    params_.validate();
    devices_.reserve(factors.size());
    for (const auto& f : factors) {
        devices_.emplace_back(params_, f.to_state(params_), v_write);
    }
}

std::vector<double> Reservoir::run(const PulseProgramSet& programs, const CycleNoiseFactory& noise,
                                   std::uint64_t image) const
{
    if (programs.programs.size() != devices_.size()) {
        throw std::invalid_argument("Reservoir::run: " + std::to_string(programs.programs.size()) +
                                    " programs for " + std::to_string(devices_.size()) + " devices");
    }
    std::vector<double> currents(devices_.size());
    for (std::size_t d = 0; d < devices_.size(); ++d) {
        const PulseProgram& prog = programs.programs[d];
        if (prog.size() > programs.max_len) {
            throw std::invalid_argument("Reservoir::run: program longer than max_len");
        }
        Memristor dev = devices_[d];
        if (noise.active()) {
            CycleNoise stream = noise.stream(image, d);
            for (std::uint8_t bit : prog) {
                dev.apply(bit != 0, stream.next());
            }
            for (std::size_t t = prog.size(); t < programs.max_len; ++t) {
                dev.apply(false, stream.next());
            }
        } else {
            for (std::uint8_t bit : prog) {
                dev.apply(bit != 0);
            }
            for (std::size_t t = prog.size(); t < programs.max_len; ++t) {
                dev.apply(false);
            }
        }
        currents[d] = read_.current(dev.x());
    }
    return currents;
}

FeatureMatrix extract_features(std::span<const GrayImage> images, const EncodingConfig& enc,
                               const Reservoir& reservoir, const QuantizerConfig& q,
                               const CycleNoiseFactory& noise, std::uint64_t image_key_base,
                               unsigned threads)
{
    q.validate();
    FeatureMatrix out;
    out.rows = images.size();
    out.cols = reservoir.size();
    out.bits = q.bits;
    out.bins.assign(out.rows * out.cols, 0);

    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PulseProgramSet programs = encode(binarize(images[i], enc.binarize_threshold), enc);
            const std::vector<double> currents = reservoir.run(programs, noise, image_key_base + i);
            std::uint16_t* dst = out.bins.data() + i * out.cols;
            for (std::size_t d = 0; d < out.cols; ++d) {
                dst[d] = static_cast<std::uint16_t>(quantize_bin(currents[d], q));
            }
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(images.size())));
    if (threads <= 1) {
        work(0, images.size());
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (images.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(images.size(), t * chunk);
        const std::size_t end = std::min(images.size(), begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace pdfn
