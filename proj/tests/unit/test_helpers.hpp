#pragma once

#include <numbers>

#include "otdf/gate.hpp"
#include "otdf/sequence.hpp"
#include "otdf/trajectory.hpp"

namespace otdf::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Scaled-down gate used where full Schrodinger runs would make the unit
// suite slow: fewer motional cycles per pulse cut the integration cost while
// keeping the physics regime of the production preset (eta values, loop
// radius, and clear separation of the drive from the two-phonon resonances
// at 2 w_cm - mu and w_cm + w_bm - mu).
inline GateConfig toy_gate() {
    GateConfig cfg;
    cfg.modes[kModeCm] = ModeSpec{kTwoPi * 1.3e6, 0.083, {1, 1}, 0.1, 33.0};
    cfg.modes[kModeBm] = ModeSpec{kTwoPi * 2.0e6, 0.063, {1, -1}, 0.1, 1.4};
    cfg.pulse.tau_total = 8e-6;
    cfg.pulse.tau_ramp = 2.0e-6;
    cfg.pulse.omega_peak = kTwoPi * 0.5e6;
    cfg.lattice.delta_k = std::numbers::sqrt2 * kTwoPi / 532e-9;
    cfg.delta = kTwoPi * 167e3;
    cfg.loops = 2;
    cfg.echo_gap = 3.2e-6;
    return cfg;
}

inline constexpr double kToyPi2Slot = 1.6e-6;

// Toy gate with solved detuning and calibrated amplitude; solved once.
inline const GateConfig& toy_gate_calibrated() {
    static const GateConfig cfg = [] {
        GateConfig c = toy_gate();
        c.delta = solve_gate_detuning(c, c.loops).delta_star;
        c.pulse.omega_peak = calibrate_amplitude(c, kToyPi2Slot);
        return c;
    }();
    return cfg;
}

}  // namespace otdf::test
