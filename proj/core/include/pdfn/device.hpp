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

// Discrete dynamic (volatile) memristor model.
//
// A device carries an internal state x in [x_min, x_max]. A pulse above the
// threshold voltage advances x through a saturating window; any pulse at or
// below threshold lets x relax exponentially toward its rest value. The
// device is read non-destructively at a sub-threshold voltage.

#include <concepts>
#include <stdexcept>
#include <string>

namespace pdfn {

/// Fitting constants of the dynamic memristor. Units: A, 1/V, 1/s, V, s.
struct DeviceParams {
    double alpha = 1e-8;       ///< A
    double beta = 0.5;         ///< 1/V
    double gamma = 1e-5;       ///< A
    double delta = 4.0;        ///< 1/V
    double lambda_rate = 1e3;  ///< 1/s
    double eta = 8.0;          ///< 1/V
    double x_max = 1.0;
    double x_min = 0.1;
    double v_th = 0.6;         ///< V
    double t_pulse = 1e-9;     ///< s
    double tau = 10e-9;        ///< s, decay time constant

    /// Throws std::invalid_argument when a parameter is non-positive or
    /// x_min >= x_max.
    void validate() const;
};

/// Internal state of one device plus its fixed per-device perturbations.
/// For a nominal device x_rest == x_min, tau_eff == tau and all scales are 1.
struct MemristorState {
    double x = 0.1;
    double x_rest = 0.1;       // relaxation target and lower clamp bound
    double tau_eff = 10e-9;
    double update_gain = 1.0;  // multiplies every delta-x
    double lambda_scale = 1.0; // device-to-device factor on lambda
    double eta_scale = 1.0;    // device-to-device factor on eta

    static MemristorState nominal(const DeviceParams& params);
};

/// Raised by read_current when the read voltage would disturb the state.
class DestructiveReadError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Window R(x) = 1 - exp(3x) / exp(3 x_max). Throws std::domain_error for
/// x outside [x_min, x_max].
double window(double x, const DeviceParams& params);

/// Supra-threshold write of one pulse of width t_pulse. `cycle_factor`
/// scales delta-x (cycle-to-cycle variation, 1.0 when noise-free). Throws
/// std::invalid_argument when v_pulse <= v_th.
MemristorState write_update(MemristorState state, double v_pulse, const DeviceParams& params,
                            double cycle_factor = 1.0);

/// Relaxation toward x_rest over `dt` seconds.
MemristorState decay_update(MemristorState state, double dt, const DeviceParams& params,
                            double cycle_factor = 1.0);

/// Source of cycle-to-cycle multipliers, one per state update.
template <typename T>
concept CycleNoiseSource = requires(T& noise) {
    { noise.next() } -> std::convertible_to<double>;
};

/// Noise-free source: always 1.
struct NoCycleNoise {
    double next() const { return 1.0; }
};

/// One time step of duration t_pulse: write when v > v_th, otherwise decay.
template <CycleNoiseSource Noise>
MemristorState step(const MemristorState& state, double v, const DeviceParams& params, Noise& noise)
{
    if (v < 0.0) {
        throw std::invalid_argument("step: negative drive voltage " + std::to_string(v));
    }
    const double factor = noise.next();
    if (v > params.v_th) {
        return write_update(state, v, params, factor);
    }
    return decay_update(state, params.t_pulse, params, factor);
}

/// Read current as an affine function of x at a fixed read voltage.
struct ReadLine {
    double ohmic;  // alpha (1 - exp(-beta V))
    double tunnel; // gamma sinh(delta V)

    double current(double x) const { return (1.0 - x) * ohmic + x * tunnel; }
};

/// Same checks as read_current.
ReadLine read_line(double v_read, const DeviceParams& params);

/// I = (1-x) alpha (1 - exp(-beta V)) + x gamma sinh(delta V).
/// Throws DestructiveReadError when v_read > v_th, std::domain_error when
/// v_read <= 0.
double read_current(double x, double v_read, const DeviceParams& params);

/// Maps an analog input u in [0, 0.5] onto the write range [0.8 V, 1.8 V].
double scale_analog(double u);

/// A device with its drive-dependent constants precomputed for a fixed write
/// voltage. Produces the same trajectory as repeated calls to step().
class Memristor {
public:
    Memristor(const DeviceParams& params, const MemristorState& initial, double v_write);

    void reset() { state_ = initial_; }

    /// Applies one pixel: '1' writes at v_write, '0' decays for t_pulse.
    void apply(bool bit, double cycle_factor = 1.0);

    double x() const { return state_.x; }
    const MemristorState& state() const { return state_; }

private:
    DeviceParams params_;
    MemristorState initial_;
    MemristorState state_;
    double write_drive_;   // t_pulse * lambda * sinh(eta * v_write), device-scaled
    double decay_loss_;    // 1 - exp(-t_pulse / tau_eff)
};

} // namespace pdfn
