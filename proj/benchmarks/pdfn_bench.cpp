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

#include "pdfn/device.hpp"
#include "pdfn/encoding.hpp"
#include "pdfn/readout.hpp"
#include "pdfn/reservoir.hpp"
#include "pdfn/variability.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace pdfn;

std::vector<GrayImage> random_images(std::size_t count)
{
    std::mt19937_64 rng(1);
    std::vector<GrayImage> out(count, GrayImage{28, 28, std::vector<std::uint8_t>(784)});
    for (auto& img : out) {
        for (auto& p : img.pixels) {
            // Roughly MNIST-like ink density.
            p = (rng() % 5 == 0) ? 255 : 0;
        }
    }
    return out;
}

void BM_DeviceStep(benchmark::State& state)
{
    const DeviceParams p;
    NoCycleNoise noise;
    MemristorState s = MemristorState::nominal(p);
    bool high = true;
    for (auto _ : state) {
        s = step(s, high ? 1.5 : 0.0, p, noise);
        high = !high;
        benchmark::DoNotOptimize(s.x);
    }
}
BENCHMARK(BM_DeviceStep);

void BM_Encode(benchmark::State& state)
{
    const auto img = binarize(random_images(1)[0], 128);
    EncodingConfig enc;
    enc.sections = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode(img, enc));
    }
}
BENCHMARK(BM_Encode)->Arg(1)->Arg(7);

void BM_ExtractFeatures(benchmark::State& state)
{
    const auto images = random_images(100);
    EncodingConfig enc;
    DeviceParams p;
    p.tau = 6e-9;
    const Reservoir res(p, reservoir_size(enc, 28, 28));
    const auto [lo, hi] = reachable_range(p, 0.6, 1.5, 4);
    const QuantizerConfig q{4, lo, hi};
    VariabilityConfig vc;
    vc.c2c_pct = state.range(0) / 100.0;
    const CycleNoiseFactory noise = vc.c2c_pct > 0 ? CycleNoiseFactory(vc, 1) : CycleNoiseFactory{};
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(images, enc, res, q, noise));
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ExtractFeatures)->Arg(0)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state)
{
    const std::size_t rows = 2000;
    const std::size_t cols = 581;
    std::mt19937_64 rng(2);
    FeatureMatrix m{rows, cols, 4, std::vector<std::uint16_t>(rows * cols)};
    for (auto& b : m.bins) {
        b = (rng() % 3 == 0) ? static_cast<std::uint16_t>(rng() % 16) : 0;
    }
    std::vector<std::uint8_t> labels(rows);
    for (auto& y : labels) {
        y = static_cast<std::uint8_t>(rng() % 10);
    }
    TrainConfig cfg;
    cfg.epochs = 1;
    const auto w0 = init_weights(cols, 10, 1, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(m, labels, w0, cfg));
    }
    state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
