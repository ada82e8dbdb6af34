#pragma once

namespace otdf {

enum class RampShape {
    kSineSquared,
};

// Shaped force pulse. The ramps apply to the coupling Omega(t) itself
// (proportional to intensity for a light-shift interaction):
//   Omega(u) = Omega_peak * sin^2(pi u / (2 tau_ramp))   for u in [0, tau_ramp],
// flat at Omega_peak, then the mirror image down. tau_total includes both
// ramps. tau_ramp = 0 gives a square pulse.
struct OdfPulse {
    double omega_peak = 0.0;  // rad/s
    double tau_ramp = 0.0;    // s
    double tau_total = 0.0;   // s
    RampShape shape = RampShape::kSineSquared;

    void validate() const;

    // Envelope at local time u in [0, tau_total]; 0 outside.
    double envelope(double u) const;

    double flat_top() const { return tau_total - 2.0 * tau_ramp; }
};

}  // namespace otdf
