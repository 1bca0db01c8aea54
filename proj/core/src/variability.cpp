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

#include "pdfn/variability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pdfn {

std::string to_string(NoiseDistribution d)
{
    return d == NoiseDistribution::Uniform ? "uniform" : "gaussian";
}

NoiseDistribution parse_distribution(const std::string& text)
{
    if (text == "uniform") {
        return NoiseDistribution::Uniform;
    }
    if (text == "gaussian") {
        return NoiseDistribution::Gaussian;
    }
    throw std::invalid_argument("unknown noise distribution '" + text + "'");
}

void VariabilityConfig::validate() const
{
    if (!(d2d_pct >= 0.0 && d2d_pct < 1.0) || !(c2c_pct >= 0.0 && c2c_pct < 1.0)) {
        throw std::invalid_argument("VariabilityConfig: percentages must lie in [0, 1)");
    }
    if (runs == 0) {
        throw std::invalid_argument("VariabilityConfig: runs must be >= 1");
    }
}

MemristorState DeviceFactors::to_state(const DeviceParams& params) const
{
    MemristorState s = MemristorState::nominal(params);
    s.x = x_init;
    s.x_rest = x_init;
    s.tau_eff = tau_eff;
    s.lambda_scale = lambda_f;
    s.eta_scale = eta_f;
    return s;
}

double perturbation(double pct, NoiseDistribution dist, SplitMix64& eng)
{
    if (dist == NoiseDistribution::Uniform) {
        return 1.0 + pct * (2.0 * uniform01(eng) - 1.0);
    }
    // Box-Muller; one normal per call keeps the stream layout trivial.
    const double u1 = 1.0 - uniform01(eng);
    const double u2 = uniform01(eng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return std::max(1e-3, 1.0 + pct * z);
}

DeviceFactors sample_device_factors(const VariabilityConfig& cfg, const DeviceParams& params,
                                    std::size_t run, std::size_t device_index)
{
    DeviceFactors f;
    f.x_init = params.x_min;
    f.tau_eff = params.tau;
    if (cfg.d2d_pct == 0.0) {
        return f;
    }
    SplitMix64 eng(derive_key({cfg.master_seed, stream_tag::device, run, device_index}));
    f.x_init = params.x_min * perturbation(cfg.d2d_pct, cfg.distribution, eng);
    f.tau_eff = params.tau * perturbation(cfg.d2d_pct, cfg.distribution, eng);
    if (cfg.vary_lambda_eta) {
        f.lambda_f = perturbation(cfg.d2d_pct, cfg.distribution, eng);
        f.eta_f = perturbation(cfg.d2d_pct, cfg.distribution, eng);
    }
    return f;
}

std::vector<DeviceFactors> sample_reservoir_factors(const VariabilityConfig& cfg,
                                                    const DeviceParams& params, std::size_t run,
                                                    std::size_t count)
{
    std::vector<DeviceFactors> out;
    out.reserve(count);
    for (std::size_t d = 0; d < count; ++d) {
        out.push_back(sample_device_factors(cfg, params, run, d));
    }
    return out;
}

CycleNoise c2c_stream(const VariabilityConfig& cfg, std::uint64_t seed)
{
    return CycleNoise(cfg.c2c_pct, cfg.distribution, derive_key({seed, stream_tag::cycle}));
}

CycleNoise CycleNoiseFactory::stream(std::uint64_t image, std::size_t device) const
{
    return CycleNoise(pct_, dist_, derive_key({seed_, stream_tag::cycle, image, device}));
}

MonteCarloStats summarize_runs(std::vector<double> accuracies)
{
    if (accuracies.empty()) {
        throw std::invalid_argument("summarize_runs: no runs");
    }
    MonteCarloStats s;
    const auto [lo, hi] = std::minmax_element(accuracies.begin(), accuracies.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
             static_cast<double>(accuracies.size());
    s.accuracies = std::move(accuracies);
    return s;
}

MonteCarloStats run_monte_carlo(std::size_t runs, const std::function<double(std::size_t)>& run_once)
{
    if (runs == 0) {
        throw std::invalid_argument("run_monte_carlo: runs must be >= 1");
    }
    std::vector<double> acc;
    acc.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        acc.push_back(run_once(r));
    }
    return summarize_runs(std::move(acc));
}

} // namespace pdfn
