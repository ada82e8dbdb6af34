#include "otdf/calibration.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "otdf/errors.hpp"

namespace otdf {

double spacing_excitation(double mismatch_phase, const GateConfig& config,
                          const SpacingScanOptions& opts) {
    GateConfig probe = config;
    probe.delta = 0.0;  // on resonance with the BM mode
    probe.lattice.theta_ion[1] = probe.lattice.theta_ion[0] + mismatch_phase;

    CompositeState state = make_initial_state(kDownDown, {0, 0}, opts.space);
    OdfHamiltonian h(probe, opts.space, 0.0, 0.0);
    IntegratorOptions iopts;
    iopts.rel_tol = opts.rel_tol;
    state = evolve(state, h, {0.0, probe.pulse.tau_total}, iopts);
    return reduce_observables(state).mean_n[kModeBm];
}

double calibrate_spacing(double bracket_lo, double bracket_hi, const GateConfig& config,
                         const SpacingScanOptions& opts) {
    if (!(bracket_hi > bracket_lo)) throw CalibrationError("calibrate_spacing: empty bracket");
    // Trial correction c shifts the lattice mismatch; the probe sees the
    // configured mismatch plus c.
    const double base = config.lattice.spacing_mismatch();
    auto excitation = [&](double c) { return spacing_excitation(base + c, config, opts); };
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = bracket_lo;
    double b = bracket_hi;
    const double fa = excitation(a);
    const double fb = excitation(b);
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = excitation(c);
    double fd = excitation(d);
    if (std::min(fc, fd) > std::min(fa, fb)) {
        throw CalibrationError("calibrate_spacing: no interior minimum in bracket");
    }
    const double xtol = 2e-4;
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = excitation(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = excitation(d);
        }
    }
    const double correction = 0.5 * (a + b);
    return -correction;
}

double intensity_beat_period(double omega_1, double omega_2) {
    const double diff = std::abs(omega_1 - omega_2);
    if (diff == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::numbers::pi / diff;
}

}  // namespace otdf
