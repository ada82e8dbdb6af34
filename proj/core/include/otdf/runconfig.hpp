#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "otdf/budget.hpp"
#include "otdf/gate.hpp"
#include "otdf/sequence.hpp"
#include "otdf/stats.hpp"

namespace otdf {

enum class Experiment {
    kDetuningScan,
    kParityScan,
    kBellRun,
    kFitHistogram,
    kBootstrap,
    kBudget,
    kCalibrateSpacing,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

struct ScanSettings {
    double from_hz = 90e3;
    double to_hz = 140e3;
    int points = 26;
    Model model = Model::kNumeric;
};

struct ParitySettings {
    int points = 48;
    Model model = Model::kAnalytic;
};

struct StatsSettings {
    MixtureModel model{60.0, 30.0, 1.0};
    int shots = 5000;
    std::uint64_t seed = 1;
    int n_boot = 10000;
    Statistic statistic = Statistic::kFidelity;
    std::vector<std::string> datasets;  // bootstrap inputs
    std::string histogram;              // fit-histogram input
};

struct CalibrationSettings {
    double bracket_lo = -1.0;  // rad
    double bracket_hi = 1.0;
    int points = 13;           // scan table resolution
};

struct OutputSettings {
    std::string dir = ".";
    std::string format = "csv";
};

// Fully validated run description. Units are converted from the human-facing
// config units (Hz, us) to SI angular units here, once.
struct RunConfig {
    Experiment experiment = Experiment::kBellRun;
    GateConfig gate;
    bool delta_auto = false;       // solve detuning before running
    bool omega_auto = true;        // calibrate omega_peak for |chi| = pi/2
    double pi2_slot = 0.0;         // s
    FockSpace space{};
    double rel_tol = 1e-9;
    bool thermal = false;
    ScanSettings scan;
    ParitySettings parity;
    StatsSettings stats;
    BudgetInputs budget;
    CalibrationSettings calibration;
    OutputSettings output;
};

// Parses and validates a config document. Unknown keys are rejected with a
// nearest-key suggestion; physical invariants of the inner types are checked;
// unset fields come from the named preset (default "ca40-2021").
RunConfig validate_config(const nlohmann::json& raw);

// Resolved-config document (sidecar payload); revalidates to an equal run.
nlohmann::json resolved_config(const RunConfig& cfg);

// Runs the experiment, writing the per-experiment artifacts plus a
// <experiment>.meta.json sidecar into cfg.output.dir. Returns 0 on success;
// failures are reported by exception (ConfigError, NumericError, StatsError).
int execute(const RunConfig& cfg);

// Locale-independent shortest round-trip formatting used for all CSV output.
std::string format_double(double v);

}  // namespace otdf
