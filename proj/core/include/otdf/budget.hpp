#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "otdf/fock.hpp"

namespace otdf {

struct BudgetInputs {
    std::array<ModeSpec, 2> modes;        // [c.m., BM]; uses eta, nbar, heat_rate
    double delta = 0.0;                   // gate detuning, rad/s
    double tau_g = 0.0;                   // total ODF drive duration (both pulses), s
    int loops = 2;                        // K
    double delta_omega = 0.0;             // trap-frequency spread, rad/s
    double d_lifetime = 1.174;            // metastable D5/2 lifetime, s
    double pre_detect_delay = 50e-6;      // analysis pulse + short delays, s
    double detect_settle = 50e-6;         // detection-laser settling, s
    double detect_duration = 200e-6;      // photon collection window, s
    double zeno_factor = 0.5;             // decay-rate suppression under illumination
    double scattering_error = 1.1e-5;     // pass-through
    double measured_infidelity = 0.0;
    double measured_infidelity_ci_high = 0.0;  // optional, 0 = absent

    void validate() const;
};

struct ErrorBudget {
    std::vector<std::pair<std::string, double>> rows;
    double dephasing_bound = 0.0;          // measured - sum(rows), floored at 0
    double dephasing_bound_ci_edge = 0.0;  // same from the CI-edge infidelity

    double row(const std::string& name) const;
    double total_known() const;
};

// Lamb-Dicke finite-temperature error, summed over modes:
// (pi^2/4) eta^4 nbar (2 nbar + 1).
double finite_temperature_error(const std::array<ModeSpec, 2>& modes);

// Gate-mode heating: ndot tau_g / (2K).
double heating_error(double heat_rate, double tau_g, int loops);

// Shot-to-shot trap-frequency variation: (pi^2/4) (delta_omega / delta)^2.
double trap_frequency_error(double delta_omega, double delta);

// Metastable D-state decay before (pre-detection) and during (detection)
// photon collection, with Zeno-suppressed rate under illumination.
std::pair<double, double> metastable_decay_error(const BudgetInputs& inputs);

ErrorBudget assemble_budget(const BudgetInputs& inputs);

// Aligned text table in units of 1e-4, two significant figures.
std::string format_budget_table(const ErrorBudget& budget);

}  // namespace otdf
