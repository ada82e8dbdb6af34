#include "otdf/budget.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "otdf/errors.hpp"

namespace otdf {

namespace {
constexpr double kQuarterPiSq = std::numbers::pi * std::numbers::pi / 4.0;
}

void BudgetInputs::validate() const {
    for (const auto& m : modes) m.validate();
    if (!(tau_g >= 0.0 && d_lifetime > 0.0 && pre_detect_delay >= 0.0 && detect_settle >= 0.0 &&
          detect_duration >= 0.0)) {
        throw ConfigError("BudgetInputs: durations must be nonnegative, lifetime positive");
    }
    if (!(zeno_factor > 0.0 && zeno_factor <= 1.0)) {
        throw ConfigError("BudgetInputs: zeno_factor must be in (0, 1]");
    }
    if (loops < 1) throw ConfigError("BudgetInputs: loops must be >= 1");
    if (delta == 0.0) throw ConfigError("BudgetInputs: delta must be nonzero");
}

double finite_temperature_error(const std::array<ModeSpec, 2>& modes) {
    double eps = 0.0;
    for (const auto& m : modes) {
        eps += kQuarterPiSq * std::pow(m.eta, 4) * m.nbar * (2.0 * m.nbar + 1.0);
    }
    return eps;
}

double heating_error(double heat_rate, double tau_g, int loops) {
    if (heat_rate < 0.0 || tau_g < 0.0 || loops < 1) {
        throw ConfigError("heating_error: inputs must be nonnegative, loops >= 1");
    }
    return heat_rate * tau_g / (2.0 * loops);
}

double trap_frequency_error(double delta_omega, double delta) {
    if (delta == 0.0) throw ConfigError("trap_frequency_error: delta must be nonzero");
    const double r = delta_omega / delta;
    return kQuarterPiSq * r * r;
}

std::pair<double, double> metastable_decay_error(const BudgetInputs& in) {
    // Two ions, 50% average D-state occupation until detection: factor 2 * 0.5.
    const double occupancy = 2.0 * 0.5;
    const double pre = occupancy * in.pre_detect_delay / in.d_lifetime +
                       occupancy * in.zeno_factor * in.detect_settle / in.d_lifetime;
    const double det = occupancy * in.zeno_factor * in.detect_duration / in.d_lifetime;
    return {pre, det};
}

double ErrorBudget::row(const std::string& name) const {
    for (const auto& [k, v] : rows) {
        if (k == name) return v;
    }
    throw ConfigError("ErrorBudget: no row named " + name);
}

double ErrorBudget::total_known() const {
    double sum = 0.0;
    for (const auto& [k, v] : rows) sum += v;
    return sum;
}

ErrorBudget assemble_budget(const BudgetInputs& in) {
    in.validate();
    const auto [pre, det] = metastable_decay_error(in);
    ErrorBudget b;
    b.rows.emplace_back("metastable_decay", pre);
    b.rows.emplace_back("detection_decay", det);
    b.rows.emplace_back("finite_temperature", finite_temperature_error(in.modes));
    b.rows.emplace_back("photon_scattering", in.scattering_error);
    b.rows.emplace_back("bm_heating", heating_error(in.modes[kModeBm].heat_rate, in.tau_g, in.loops));
    b.rows.emplace_back("trap_frequency", trap_frequency_error(in.delta_omega, in.delta));
    const double known = b.total_known();
    b.dephasing_bound = std::max(0.0, in.measured_infidelity - known);
    const double ci = in.measured_infidelity_ci_high > 0.0 ? in.measured_infidelity_ci_high
                                                           : in.measured_infidelity;
    b.dephasing_bound_ci_edge = std::max(0.0, ci - known);
    return b;
}

std::string format_budget_table(const ErrorBudget& b) {
    static const std::pair<const char*, const char*> labels[] = {
        {"metastable_decay", "Metastable D5/2 decay"},
        {"detection_decay", "Detection D5/2 decay"},
        {"finite_temperature", "Finite axial mode temperature"},
        {"photon_scattering", "Spontaneous photon scattering"},
        {"bm_heating", "BM mode heating"},
        {"trap_frequency", "Trap frequency variation"},
    };
    char line[128];
    std::string out;
    out += "Error source                      Contribution (x 1e-4)\n";
    std::snprintf(line, sizeof line, "%-33s <= %.2g\n", "Spin dephasing (bound)",
                  b.dephasing_bound * 1e4);
    out += line;
    for (const auto& [key, label] : labels) {
        std::snprintf(line, sizeof line, "%-33s %.2g\n", label, b.row(key) * 1e4);
        out += line;
    }
    return out;
}

}  // namespace otdf
