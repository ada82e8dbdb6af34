#include "otdf/pulse.hpp"

#include <cmath>
#include <numbers>

#include "otdf/errors.hpp"

namespace otdf {

void OdfPulse::validate() const {
    if (!(omega_peak >= 0.0)) throw ConfigError("OdfPulse: omega_peak must be >= 0");
    if (!(tau_ramp >= 0.0)) throw ConfigError("OdfPulse: tau_ramp must be >= 0");
    if (!(tau_total > 0.0)) throw ConfigError("OdfPulse: tau_total must be > 0");
    if (2.0 * tau_ramp > tau_total) {
        throw ConfigError("OdfPulse: 2 * tau_ramp must not exceed tau_total");
    }
}

double OdfPulse::envelope(double u) const {
    // Closed interval so a square pulse is exactly constant on [0, tau_total];
    // integrator stages land on the endpoints.
    if (u < 0.0 || u > tau_total) return 0.0;
    if (tau_ramp == 0.0) return omega_peak;
    if (u < tau_ramp) {
        const double s = std::sin(std::numbers::pi * u / (2.0 * tau_ramp));
        return omega_peak * s * s;
    }
    if (u > tau_total - tau_ramp) {
        const double s = std::sin(std::numbers::pi * (tau_total - u) / (2.0 * tau_ramp));
        return omega_peak * s * s;
    }
    return omega_peak;
}

}  // namespace otdf
