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

// Device-to-device and cycle-to-cycle variation.
//
// Every random quantity is drawn from a substream keyed by the tuple that
// identifies it: (master_seed, run, device) for fixed device factors and
// (seed, image, device) for cycle noise. Results therefore never depend on
// evaluation order or thread count.

#include "pdfn/device.hpp"
#include "pdfn/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pdfn {

enum class NoiseDistribution { Uniform, Gaussian };

std::string to_string(NoiseDistribution d);
NoiseDistribution parse_distribution(const std::string& text);

struct VariabilityConfig {
    double d2d_pct = 0.0;          // half-width (uniform) or sigma (gaussian)
    double c2c_pct = 0.0;
    bool vary_lambda_eta = false;  // Monte-Carlo mode: also perturb lambda and eta
    std::size_t runs = 30;
    std::uint64_t master_seed = 0;
    NoiseDistribution distribution = NoiseDistribution::Uniform;

    void validate() const;
    bool enabled() const { return d2d_pct > 0.0 || c2c_pct > 0.0; }
};

struct DeviceFactors {
    double x_init = 0.1;   // absolute initial (and rest) state
    double tau_eff = 10e-9;
    double lambda_f = 1.0;
    double eta_f = 1.0;

    MemristorState to_state(const DeviceParams& params) const;
};

/// Fixed factors of device `device_index` in Monte-Carlo run `run`.
DeviceFactors sample_device_factors(const VariabilityConfig& cfg, const DeviceParams& params,
                                    std::size_t run, std::size_t device_index);

/// Factors for a whole reservoir of `count` devices.
std::vector<DeviceFactors> sample_reservoir_factors(const VariabilityConfig& cfg,
                                                    const DeviceParams& params, std::size_t run,
                                                    std::size_t count);

/// Multiplicative perturbation 1 + p * e, e ~ U[-1, 1] (or N(0, 1) for the
/// gaussian flavour, floored at a small positive value).
double perturbation(double pct, NoiseDistribution dist, SplitMix64& eng);

/// Cycle-to-cycle multiplier stream. With pct == 0 it yields exactly 1.0
/// without consuming randomness.
class CycleNoise {
public:
    CycleNoise(double pct, NoiseDistribution dist, std::uint64_t key)
        : pct_(pct), dist_(dist), eng_(key)
    {
    }

    double next()
    {
        return pct_ == 0.0 ? 1.0 : perturbation(pct_, dist_, eng_);
    }

private:
    double pct_;
    NoiseDistribution dist_;
    SplitMix64 eng_;
};

CycleNoise c2c_stream(const VariabilityConfig& cfg, std::uint64_t seed);

/// Hands out one independent cycle-noise stream per (image, device).
class CycleNoiseFactory {
public:
    CycleNoiseFactory() = default;
    CycleNoiseFactory(const VariabilityConfig& cfg, std::uint64_t seed)
        : pct_(cfg.c2c_pct), dist_(cfg.distribution), seed_(seed)
    {
    }

    bool active() const { return pct_ > 0.0; }
    CycleNoise stream(std::uint64_t image, std::size_t device) const;

private:
    double pct_ = 0.0;
    NoiseDistribution dist_ = NoiseDistribution::Uniform;
    std::uint64_t seed_ = 0;
};

struct MonteCarloStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> accuracies;
};

MonteCarloStats summarize_runs(std::vector<double> accuracies);

/// Calls `run_once(run)` for run = 0..runs-1 and aggregates the accuracies.
/// An exception from any run aborts the sweep.
MonteCarloStats run_monte_carlo(std::size_t runs, const std::function<double(std::size_t)>& run_once);

} // namespace pdfn
