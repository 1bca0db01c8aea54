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

#include <algorithm>
#include <cmath>

namespace pdfn {

namespace {

double window_unchecked(double x, double x_max)
{
    return 1.0 - std::exp(3.0 * (x - x_max));
}

double write_drive(const DeviceParams& p, const MemristorState& s, double v_pulse)
{
    return p.t_pulse * p.lambda_rate * s.lambda_scale * std::sinh(p.eta * s.eta_scale * v_pulse);
}

double advance_write(double x, double drive, double gain, double x_rest, double x_max)
{
    // The window is evaluated at the clamped-in-range point: a device whose
    // rest state sits below x_min (perturbed initialisation) still sees R <= 1.
    const double r = std::max(0.0, window_unchecked(std::min(x, x_max), x_max));
    return std::clamp(x + gain * r * drive, std::min(x_rest, x_max), x_max);
}

double advance_decay(double x, double loss, double gain, double x_rest, double x_max)
{
    return std::clamp(x - gain * (x - x_rest) * loss, std::min(x_rest, x_max), x_max);
}

} // namespace

void DeviceParams::validate() const
{
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("DeviceParams: ") + name + " must be positive");
        }
    };
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(gamma, "gamma");
    positive(delta, "delta");
    positive(lambda_rate, "lambda_rate");
    positive(eta, "eta");
    positive(x_max, "x_max");
    positive(x_min, "x_min");
    positive(v_th, "v_th");
    positive(t_pulse, "t_pulse");
    positive(tau, "tau");
    if (!(x_min < x_max)) {
        throw std::invalid_argument("DeviceParams: x_min must be below x_max");
    }
}

MemristorState MemristorState::nominal(const DeviceParams& params)
{
    MemristorState s;
    s.x = params.x_min;
    s.x_rest = params.x_min;
    s.tau_eff = params.tau;
    return s;
}

double window(double x, const DeviceParams& params)
{
    if (!(x >= params.x_min && x <= params.x_max)) {
        throw std::domain_error("window: x=" + std::to_string(x) + " outside [x_min, x_max]");
    }
    return window_unchecked(x, params.x_max);
}

MemristorState write_update(MemristorState state, double v_pulse, const DeviceParams& params,
                            double cycle_factor)
{
    if (!(v_pulse > params.v_th)) {
        throw std::invalid_argument("write_update: pulse " + std::to_string(v_pulse) +
                                    " V is not above threshold");
    }
    state.x = advance_write(state.x, write_drive(params, state, v_pulse),
                            state.update_gain * cycle_factor, state.x_rest, params.x_max);
    return state;
}

MemristorState decay_update(MemristorState state, double dt, const DeviceParams& params,
                            double cycle_factor)
{
    if (dt < 0.0) {
        throw std::invalid_argument("decay_update: negative dt");
    }
    const double loss = -std::expm1(-dt / state.tau_eff);
    state.x = advance_decay(state.x, loss, state.update_gain * cycle_factor, state.x_rest,
                            params.x_max);
    return state;
}

ReadLine read_line(double v_read, const DeviceParams& params)
{
    if (!(v_read > 0.0)) {
        throw std::domain_error("read_current: read voltage must be positive");
    }
    if (v_read > params.v_th) {
        throw DestructiveReadError("read_current: " + std::to_string(v_read) +
                                   " V exceeds the switching threshold");
    }
    return ReadLine{params.alpha * (1.0 - std::exp(-params.beta * v_read)),
                    params.gamma * std::sinh(params.delta * v_read)};
}

double read_current(double x, double v_read, const DeviceParams& params)
{
    return read_line(v_read, params).current(x);
}

double scale_analog(double u)
{
    if (!(u >= 0.0 && u <= 0.5)) {
        throw std::domain_error("scale_analog: input must lie in [0, 0.5]");
    }
    return 0.8 + 2.0 * u;
}

Memristor::Memristor(const DeviceParams& params, const MemristorState& initial, double v_write)
    : params_(params), initial_(initial), state_(initial)
{
    if (!(v_write > params.v_th)) {
        throw std::invalid_argument("Memristor: write voltage must exceed the threshold");
    }
    write_drive_ = write_drive(params, initial, v_write);
    decay_loss_ = -std::expm1(-params.t_pulse / initial.tau_eff);
}

void Memristor::apply(bool bit, double cycle_factor)
{
    const double gain = state_.update_gain * cycle_factor;
    if (bit) {
        state_.x = advance_write(state_.x, write_drive_, gain, state_.x_rest, params_.x_max);
    } else {
        state_.x = advance_decay(state_.x, decay_loss_, gain, state_.x_rest, params_.x_max);
    }
}

} // namespace pdfn
