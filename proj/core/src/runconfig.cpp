#include "otdf/runconfig.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "otdf/calibration.hpp"
#include "otdf/errors.hpp"
#include "otdf/parallel.hpp"
#include "otdf/presets.hpp"
#include "otdf/trajectory.hpp"
#include "otdf/version.hpp"

namespace otdf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Json = nlohmann::json;

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void check_keys(const Json& obj, const std::vector<std::string>& allowed,
                const std::string& section) {
    if (!obj.is_object()) throw ConfigError("config section \"" + section + "\" must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        std::string best;
        int best_d = 1000;
        for (const auto& cand : allowed) {
            const int d = levenshtein(key, cand);
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
        std::string msg = "unknown key \"" + section + "." + key + "\"";
        if (best_d <= 3) msg += "; did you mean \"" + best + "\"?";
        throw ConfigError(msg);
    }
}

double require_positive(const Json& v, const std::string& key) {
    const double x = v.get<double>();
    if (!(x > 0.0)) throw ConfigError("config key \"" + key + "\" must be > 0");
    return x;
}

double require_nonnegative(const Json& v, const std::string& key) {
    const double x = v.get<double>();
    if (!(x >= 0.0)) throw ConfigError("config key \"" + key + "\" must be >= 0");
    return x;
}

// Numeric value or the string "auto".
bool auto_or_number(const Json& v, const std::string& key, double& out) {
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return true;
        throw ConfigError("config key \"" + key + "\" must be a number or \"auto\"");
    }
    out = v.get<double>();
    return false;
}

Model model_from_name(const Json& v, const std::string& key) {
    const std::string s = v.get<std::string>();
    if (s == "analytic") return Model::kAnalytic;
    if (s == "numeric") return Model::kNumeric;
    throw ConfigError("config key \"" + key + "\" must be \"analytic\" or \"numeric\"");
}

Statistic statistic_from_name(const std::string& s) {
    if (s == "parity-amplitude") return Statistic::kParityAmplitude;
    if (s == "even-population") return Statistic::kEvenPopulation;
    if (s == "fidelity") return Statistic::kFidelity;
    throw ConfigError("statistics.statistic must be one of parity-amplitude, even-population, "
                      "fidelity");
}

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::kParityAmplitude: return "parity-amplitude";
        case Statistic::kEvenPopulation: return "even-population";
        case Statistic::kFidelity: return "fidelity";
    }
    return "?";
}

const char* model_name(Model m) { return m == Model::kAnalytic ? "analytic" : "numeric"; }

void parse_physics(const Json& phys, RunConfig& cfg) {
    check_keys(phys,
               {"omega_cm_hz", "omega_bm_hz", "eta_cm", "eta_bm", "nbar_cm", "nbar_bm",
                "heat_cm_qps", "heat_bm_qps", "delta_hz", "omega_peak_hz", "tau_odf_us",
                "tau_ramp_us", "loops", "pi_time_us", "pi2_time_us", "lattice_phase_rad",
                "spacing_mismatch_rad", "balance", "compensate_echo_phase", "truncation",
                "rel_tol", "thermal_initial"},
               "physics");
    auto& gate = cfg.gate;
    if (phys.contains("omega_cm_hz"))
        gate.modes[kModeCm].omega = kTwoPi * require_positive(phys["omega_cm_hz"], "physics.omega_cm_hz");
    if (phys.contains("omega_bm_hz"))
        gate.modes[kModeBm].omega = kTwoPi * require_positive(phys["omega_bm_hz"], "physics.omega_bm_hz");
    if (phys.contains("eta_cm")) gate.modes[kModeCm].eta = phys["eta_cm"].get<double>();
    if (phys.contains("eta_bm")) gate.modes[kModeBm].eta = phys["eta_bm"].get<double>();
    if (phys.contains("nbar_cm"))
        gate.modes[kModeCm].nbar = require_nonnegative(phys["nbar_cm"], "physics.nbar_cm");
    if (phys.contains("nbar_bm"))
        gate.modes[kModeBm].nbar = require_nonnegative(phys["nbar_bm"], "physics.nbar_bm");
    if (phys.contains("heat_cm_qps"))
        gate.modes[kModeCm].heat_rate = require_nonnegative(phys["heat_cm_qps"], "physics.heat_cm_qps");
    if (phys.contains("heat_bm_qps"))
        gate.modes[kModeBm].heat_rate = require_nonnegative(phys["heat_bm_qps"], "physics.heat_bm_qps");
    if (phys.contains("delta_hz")) {
        double v = 0.0;
        cfg.delta_auto = auto_or_number(phys["delta_hz"], "physics.delta_hz", v);
        if (!cfg.delta_auto) gate.delta = kTwoPi * v;
    }
    if (phys.contains("omega_peak_hz")) {
        double v = 0.0;
        cfg.omega_auto = auto_or_number(phys["omega_peak_hz"], "physics.omega_peak_hz", v);
        if (!cfg.omega_auto) gate.pulse.omega_peak = kTwoPi * v;
    }
    if (phys.contains("tau_odf_us"))
        gate.pulse.tau_total = 1e-6 * require_positive(phys["tau_odf_us"], "physics.tau_odf_us");
    if (phys.contains("tau_ramp_us"))
        gate.pulse.tau_ramp = 1e-6 * require_nonnegative(phys["tau_ramp_us"], "physics.tau_ramp_us");
    if (phys.contains("loops")) gate.loops = phys["loops"].get<int>();
    if (phys.contains("pi_time_us"))
        gate.echo_gap = 1e-6 * require_nonnegative(phys["pi_time_us"], "physics.pi_time_us");
    if (phys.contains("pi2_time_us"))
        cfg.pi2_slot = 1e-6 * require_nonnegative(phys["pi2_time_us"], "physics.pi2_time_us");
    if (phys.contains("lattice_phase_rad")) gate.lattice.phi = phys["lattice_phase_rad"].get<double>();
    if (phys.contains("spacing_mismatch_rad")) {
        gate.lattice.theta_ion[1] =
            gate.lattice.theta_ion[0] + phys["spacing_mismatch_rad"].get<double>();
    }
    if (phys.contains("balance")) {
        const auto& b = phys["balance"];
        if (!b.is_array() || b.size() != 2) {
            throw ConfigError("physics.balance must be a 2-element array");
        }
        gate.lattice.balance = {require_positive(b[0], "physics.balance[0]"),
                                require_positive(b[1], "physics.balance[1]")};
    }
    if (phys.contains("compensate_echo_phase"))
        gate.compensate_echo_phase = phys["compensate_echo_phase"].get<bool>();
    if (phys.contains("truncation")) {
        const auto& t = phys["truncation"];
        if (!t.is_array() || t.size() != 2) {
            throw ConfigError("physics.truncation must be a 2-element array");
        }
        cfg.space.n_cm = t[0].get<int>();
        cfg.space.n_bm = t[1].get<int>();
        if (cfg.space.n_cm < 2 || cfg.space.n_bm < 2) {
            throw ConfigError("physics.truncation entries must be >= 2");
        }
    }
    if (phys.contains("rel_tol")) cfg.rel_tol = require_positive(phys["rel_tol"], "physics.rel_tol");
    if (phys.contains("thermal_initial")) cfg.thermal = phys["thermal_initial"].get<bool>();
}

}  // namespace

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::kDetuningScan: return "detuning-scan";
        case Experiment::kParityScan: return "parity-scan";
        case Experiment::kBellRun: return "bell-run";
        case Experiment::kFitHistogram: return "fit-histogram";
        case Experiment::kBootstrap: return "bootstrap";
        case Experiment::kBudget: return "budget";
        case Experiment::kCalibrateSpacing: return "calibrate-spacing";
    }
    return "?";
}

Experiment experiment_from_name(const std::string& name) {
    static const std::pair<const char*, Experiment> table[] = {
        {"detuning-scan", Experiment::kDetuningScan},
        {"parity-scan", Experiment::kParityScan},
        {"bell-run", Experiment::kBellRun},
        {"fit-histogram", Experiment::kFitHistogram},
        {"bootstrap", Experiment::kBootstrap},
        {"budget", Experiment::kBudget},
        {"calibrate-spacing", Experiment::kCalibrateSpacing},
    };
    for (const auto& [n, e] : table) {
        if (name == n) return e;
    }
    throw ConfigError("unknown experiment \"" + name + "\"");
}

RunConfig validate_config(const Json& raw) {
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(raw,
               {"experiment", "preset", "physics", "scan", "parity", "statistics", "budget",
                "calibration", "output"},
               "config");

    const std::string preset =
        raw.contains("preset") ? raw["preset"].get<std::string>() : "ca40-2021";
    if (preset != "ca40-2021") throw ConfigError("unknown preset \"" + preset + "\"");

    RunConfig cfg;
    cfg.gate = presets::ca40_2021_gate();
    cfg.pi2_slot = presets::ca40_2021_pi2_slot();
    cfg.stats.model = presets::ca40_2021_mixture();
    cfg.budget = presets::ca40_2021_budget();

    if (!raw.contains("experiment")) throw ConfigError("config key \"experiment\" is required");
    cfg.experiment = experiment_from_name(raw["experiment"].get<std::string>());

    if (raw.contains("physics")) parse_physics(raw["physics"], cfg);

    if (raw.contains("scan")) {
        const auto& s = raw["scan"];
        check_keys(s, {"from_hz", "to_hz", "points", "model"}, "scan");
        if (s.contains("from_hz")) cfg.scan.from_hz = require_positive(s["from_hz"], "scan.from_hz");
        if (s.contains("to_hz")) cfg.scan.to_hz = require_positive(s["to_hz"], "scan.to_hz");
        if (s.contains("points")) cfg.scan.points = s["points"].get<int>();
        if (s.contains("model")) cfg.scan.model = model_from_name(s["model"], "scan.model");
        if (cfg.scan.points < 2) throw ConfigError("scan.points must be >= 2");
        if (!(cfg.scan.to_hz > cfg.scan.from_hz)) {
            throw ConfigError("scan.to_hz must exceed scan.from_hz");
        }
    }
    if (raw.contains("parity")) {
        const auto& s = raw["parity"];
        check_keys(s, {"points", "model"}, "parity");
        if (s.contains("points")) cfg.parity.points = s["points"].get<int>();
        if (s.contains("model")) cfg.parity.model = model_from_name(s["model"], "parity.model");
        if (cfg.parity.points < 2) throw ConfigError("parity.points must be >= 2");
    }
    if (raw.contains("statistics")) {
        const auto& s = raw["statistics"];
        check_keys(s, {"k0", "k1", "k2", "shots", "seed", "n_boot", "statistic", "datasets",
                       "histogram"},
                   "statistics");
        if (s.contains("k0")) cfg.stats.model.k0 = s["k0"].get<double>();
        if (s.contains("k1")) cfg.stats.model.k1 = s["k1"].get<double>();
        if (s.contains("k2")) cfg.stats.model.k2 = s["k2"].get<double>();
        cfg.stats.model.validate();
        if (s.contains("shots")) {
            cfg.stats.shots = s["shots"].get<int>();
            if (cfg.stats.shots < 1) throw ConfigError("statistics.shots must be >= 1");
        }
        if (s.contains("seed")) cfg.stats.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("n_boot")) {
            cfg.stats.n_boot = s["n_boot"].get<int>();
            if (cfg.stats.n_boot < 100) throw ConfigError("statistics.n_boot must be >= 100");
        }
        if (s.contains("statistic")) {
            cfg.stats.statistic = statistic_from_name(s["statistic"].get<std::string>());
        }
        if (s.contains("datasets")) {
            for (const auto& d : s["datasets"]) cfg.stats.datasets.push_back(d.get<std::string>());
        }
        if (s.contains("histogram")) cfg.stats.histogram = s["histogram"].get<std::string>();
    }
    if (raw.contains("budget")) {
        const auto& s = raw["budget"];
        check_keys(s,
                   {"delta_omega_hz", "d_lifetime_s", "pre_detect_delay_us", "detect_settle_us",
                    "detect_duration_us", "zeno_factor", "scattering_error",
                    "measured_infidelity", "measured_infidelity_ci_high"},
                   "budget");
        auto& b = cfg.budget;
        if (s.contains("delta_omega_hz"))
            b.delta_omega = kTwoPi * require_nonnegative(s["delta_omega_hz"], "budget.delta_omega_hz");
        if (s.contains("d_lifetime_s"))
            b.d_lifetime = require_positive(s["d_lifetime_s"], "budget.d_lifetime_s");
        if (s.contains("pre_detect_delay_us"))
            b.pre_detect_delay =
                1e-6 * require_nonnegative(s["pre_detect_delay_us"], "budget.pre_detect_delay_us");
        if (s.contains("detect_settle_us"))
            b.detect_settle =
                1e-6 * require_nonnegative(s["detect_settle_us"], "budget.detect_settle_us");
        if (s.contains("detect_duration_us"))
            b.detect_duration =
                1e-6 * require_nonnegative(s["detect_duration_us"], "budget.detect_duration_us");
        if (s.contains("zeno_factor")) {
            b.zeno_factor = s["zeno_factor"].get<double>();
            if (!(b.zeno_factor > 0.0 && b.zeno_factor <= 1.0)) {
                throw ConfigError("budget.zeno_factor must be in (0, 1]");
            }
        }
        if (s.contains("scattering_error"))
            b.scattering_error =
                require_nonnegative(s["scattering_error"], "budget.scattering_error");
        if (s.contains("measured_infidelity"))
            b.measured_infidelity =
                require_nonnegative(s["measured_infidelity"], "budget.measured_infidelity");
        if (s.contains("measured_infidelity_ci_high"))
            b.measured_infidelity_ci_high = require_nonnegative(
                s["measured_infidelity_ci_high"], "budget.measured_infidelity_ci_high");
    }
    if (raw.contains("calibration")) {
        const auto& s = raw["calibration"];
        check_keys(s, {"bracket_lo_rad", "bracket_hi_rad", "points"}, "calibration");
        if (s.contains("bracket_lo_rad")) cfg.calibration.bracket_lo = s["bracket_lo_rad"].get<double>();
        if (s.contains("bracket_hi_rad")) cfg.calibration.bracket_hi = s["bracket_hi_rad"].get<double>();
        if (s.contains("points")) cfg.calibration.points = s["points"].get<int>();
        if (!(cfg.calibration.bracket_hi > cfg.calibration.bracket_lo)) {
            throw ConfigError("calibration bracket must be nonempty");
        }
        if (cfg.calibration.points < 3) throw ConfigError("calibration.points must be >= 3");
    }
    if (raw.contains("output")) {
        const auto& s = raw["output"];
        check_keys(s, {"dir", "format"}, "output");
        if (s.contains("dir")) cfg.output.dir = s["dir"].get<std::string>();
        if (s.contains("format")) {
            cfg.output.format = s["format"].get<std::string>();
            if (cfg.output.format != "csv") throw ConfigError("output.format must be \"csv\"");
        }
    }

    // Physical invariants of the assembled gate.
    for (const auto& m : cfg.gate.modes) m.validate();
    cfg.gate.pulse.validate();
    cfg.gate.lattice.validate();
    if (cfg.gate.loops < 1) throw ConfigError("physics.loops must be >= 1");
    if (!cfg.delta_auto && cfg.gate.delta == 0.0 &&
        cfg.experiment != Experiment::kCalibrateSpacing) {
        throw ConfigError("physics.delta_hz must be nonzero (or \"auto\")");
    }
    cfg.budget.modes = cfg.gate.modes;
    cfg.budget.delta = cfg.gate.delta;
    cfg.budget.tau_g = 2.0 * cfg.gate.pulse.tau_total;
    cfg.budget.loops = cfg.gate.loops;
    return cfg;
}

nlohmann::json resolved_config(const RunConfig& cfg) {
    Json j;
    j["experiment"] = experiment_name(cfg.experiment);
    j["preset"] = "ca40-2021";
    Json phys;
    phys["omega_cm_hz"] = cfg.gate.modes[kModeCm].omega / kTwoPi;
    phys["omega_bm_hz"] = cfg.gate.modes[kModeBm].omega / kTwoPi;
    phys["eta_cm"] = cfg.gate.modes[kModeCm].eta;
    phys["eta_bm"] = cfg.gate.modes[kModeBm].eta;
    phys["nbar_cm"] = cfg.gate.modes[kModeCm].nbar;
    phys["nbar_bm"] = cfg.gate.modes[kModeBm].nbar;
    phys["heat_cm_qps"] = cfg.gate.modes[kModeCm].heat_rate;
    phys["heat_bm_qps"] = cfg.gate.modes[kModeBm].heat_rate;
    phys["delta_hz"] = cfg.gate.delta / kTwoPi;
    phys["omega_peak_hz"] = cfg.gate.pulse.omega_peak / kTwoPi;
    phys["tau_odf_us"] = cfg.gate.pulse.tau_total / 1e-6;
    phys["tau_ramp_us"] = cfg.gate.pulse.tau_ramp / 1e-6;
    phys["loops"] = cfg.gate.loops;
    phys["pi_time_us"] = cfg.gate.echo_gap / 1e-6;
    phys["pi2_time_us"] = cfg.pi2_slot / 1e-6;
    phys["lattice_phase_rad"] = cfg.gate.lattice.phi;
    phys["spacing_mismatch_rad"] = cfg.gate.lattice.spacing_mismatch();
    phys["balance"] = cfg.gate.lattice.balance;
    phys["compensate_echo_phase"] = cfg.gate.compensate_echo_phase;
    phys["truncation"] = {cfg.space.n_cm, cfg.space.n_bm};
    phys["rel_tol"] = cfg.rel_tol;
    phys["thermal_initial"] = cfg.thermal;
    j["physics"] = phys;
    j["scan"] = {{"from_hz", cfg.scan.from_hz},
                 {"to_hz", cfg.scan.to_hz},
                 {"points", cfg.scan.points},
                 {"model", model_name(cfg.scan.model)}};
    j["parity"] = {{"points", cfg.parity.points}, {"model", model_name(cfg.parity.model)}};
    Json stats;
    stats["k0"] = cfg.stats.model.k0;
    stats["k1"] = cfg.stats.model.k1;
    stats["k2"] = cfg.stats.model.k2;
    stats["shots"] = cfg.stats.shots;
    stats["seed"] = cfg.stats.seed;
    stats["n_boot"] = cfg.stats.n_boot;
    stats["statistic"] = statistic_name(cfg.stats.statistic);
    if (!cfg.stats.datasets.empty()) stats["datasets"] = cfg.stats.datasets;
    if (!cfg.stats.histogram.empty()) stats["histogram"] = cfg.stats.histogram;
    j["statistics"] = stats;
    j["budget"] = {{"delta_omega_hz", cfg.budget.delta_omega / kTwoPi},
                   {"d_lifetime_s", cfg.budget.d_lifetime},
                   {"pre_detect_delay_us", cfg.budget.pre_detect_delay / 1e-6},
                   {"detect_settle_us", cfg.budget.detect_settle / 1e-6},
                   {"detect_duration_us", cfg.budget.detect_duration / 1e-6},
                   {"zeno_factor", cfg.budget.zeno_factor},
                   {"scattering_error", cfg.budget.scattering_error},
                   {"measured_infidelity", cfg.budget.measured_infidelity},
                   {"measured_infidelity_ci_high", cfg.budget.measured_infidelity_ci_high}};
    j["calibration"] = {{"bracket_lo_rad", cfg.calibration.bracket_lo},
                        {"bracket_hi_rad", cfg.calibration.bracket_hi},
                        {"points", cfg.calibration.points}};
    j["output"] = {{"dir", cfg.output.dir}, {"format", cfg.output.format}};
    return j;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
}

void write_sidecar(const RunConfig& cfg, const std::filesystem::path& dir) {
    Json meta;
    meta["version"] = kVersion;
    meta["count_file_format"] = kCountFileFormatVersion;
    meta["resolved_config"] = resolved_config(cfg);
    write_file(dir / (std::string(experiment_name(cfg.experiment)) + ".meta.json"),
               meta.dump(2) + "\n");
}

RunOptions run_options(const RunConfig& cfg, Model model) {
    RunOptions opts;
    opts.model = model;
    opts.thermal = cfg.thermal;
    opts.space = cfg.space;
    opts.rel_tol = cfg.rel_tol;
    return opts;
}

// delta/omega "auto" resolution shared by the gate experiments.
RunConfig resolve_gate(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    if (cfg.delta_auto) {
        cfg.gate.delta = solve_gate_detuning(cfg.gate, cfg.gate.loops).delta_star;
        cfg.delta_auto = false;
    }
    if (cfg.omega_auto) {
        if (cfg.gate.pulse.omega_peak <= 0.0) cfg.gate.pulse.omega_peak = kTwoPi * 0.6e6;
        cfg.gate.pulse.omega_peak = calibrate_amplitude(cfg.gate, cfg.pi2_slot);
        cfg.omega_auto = false;
    }
    cfg.budget.delta = cfg.gate.delta;
    return cfg;
}

std::vector<Dataset> load_datasets(const RunConfig& cfg) {
    if (cfg.stats.datasets.empty()) {
        throw ConfigError("bootstrap requires statistics.datasets");
    }
    std::vector<Dataset> out;
    for (const auto& path : cfg.stats.datasets) {
        const CountFile f = load_count_file(path);
        out.push_back({f.hist, f.model.value_or(cfg.stats.model)});
    }
    return out;
}

int execute_impl(const RunConfig& cfg_in) {
    const std::filesystem::path dir(cfg_in.output.dir);
    std::filesystem::create_directories(dir);

    switch (cfg_in.experiment) {
        case Experiment::kDetuningScan: {
            const RunConfig cfg = resolve_gate(cfg_in);
            std::vector<double> deltas(cfg.scan.points);
            for (int i = 0; i < cfg.scan.points; ++i) {
                const double hz = cfg.scan.from_hz +
                                  (cfg.scan.to_hz - cfg.scan.from_hz) * i / (cfg.scan.points - 1);
                deltas[i] = kTwoPi * hz;
            }
            const auto rows =
                detuning_scan(deltas, cfg.gate, cfg.pi2_slot, run_options(cfg, cfg.scan.model));
            std::string csv = "delta_hz,p0,p1,p2\n";
            for (const auto& r : rows) {
                csv += format_double(r.delta / kTwoPi) + "," + format_double(r.p0) + "," +
                       format_double(r.p1) + "," + format_double(r.p2) + "\n";
            }
            write_file(dir / "detuning-scan.csv", csv);
            write_sidecar(cfg, dir);
            return 0;
        }
        case Experiment::kParityScan: {
            const RunConfig cfg = resolve_gate(cfg_in);
            std::vector<double> phis(cfg.parity.points);
            for (int i = 0; i < cfg.parity.points; ++i) {
                phis[i] = std::numbers::pi * i / (cfg.parity.points - 1);
            }
            const auto rows =
                parity_scan(phis, cfg.gate, cfg.pi2_slot, run_options(cfg, cfg.parity.model));
            std::string csv = "phi_rad,parity\n";
            for (const auto& r : rows) {
                csv += format_double(r.phi) + "," + format_double(r.parity) + "\n";
            }
            write_file(dir / "parity-scan.csv", csv);
            write_sidecar(cfg, dir);
            return 0;
        }
        case Experiment::kBellRun: {
            const RunConfig cfg = resolve_gate(cfg_in);
            const auto segs = build_bell_sequence(cfg.gate, cfg.pi2_slot, std::nullopt);
            const auto res =
                run_sequence(segs, cfg.gate, run_options(cfg, cfg.scan.model));
            const double chi = entangling_phase(cfg.gate, cfg.pi2_slot);
            std::string csv = "delta_hz,p0,p1,p2,chi_rad\n";
            csv += format_double(cfg.gate.delta / kTwoPi) + "," + format_double(res.p0) + "," +
                   format_double(res.p1) + "," + format_double(res.p2) + "," +
                   format_double(chi) + "\n";
            write_file(dir / "bell-run.csv", csv);
            write_sidecar(cfg, dir);
            return 0;
        }
        case Experiment::kFitHistogram: {
            if (cfg_in.stats.histogram.empty()) {
                throw ConfigError("fit-histogram requires statistics.histogram");
            }
            const CountFile f = load_count_file(cfg_in.stats.histogram);
            const MixtureModel model = f.model.value_or(cfg_in.stats.model);
            const PopulationEstimate est = mle_populations(f.hist, model);
            Json out;
            out["p0"] = est.p0;
            out["p1"] = est.p1;
            out["p2"] = est.p2;
            out["log_likelihood"] = est.log_likelihood;
            out["boundary"] = est.boundary;
            out["shots"] = f.hist.shots();
            out["model"] = {{"k0", model.k0}, {"k1", model.k1}, {"k2", model.k2}};
            write_file(dir / "fit-histogram.json", out.dump(2) + "\n");
            write_sidecar(cfg_in, dir);
            return 0;
        }
        case Experiment::kBootstrap: {
            const auto datasets = load_datasets(cfg_in);
            const BootstrapResult res = bootstrap(datasets, cfg_in.stats.n_boot,
                                                  cfg_in.stats.seed, cfg_in.stats.statistic);
            Json out;
            out["statistic"] = statistic_name(cfg_in.stats.statistic);
            out["point"] = res.point;
            out["mean"] = res.mean;
            out["ci68"] = {res.lo, res.hi};
            out["n_boot"] = res.n_boot;
            out["dropped"] = res.dropped;
            out["seed"] = cfg_in.stats.seed;
            write_file(dir / "bootstrap.json", out.dump(2) + "\n");
            write_sidecar(cfg_in, dir);
            return 0;
        }
        case Experiment::kBudget: {
            const ErrorBudget b = assemble_budget(cfg_in.budget);
            Json out;
            Json rows = Json::array();
            for (const auto& [name, value] : b.rows) {
                rows.push_back({{"source", name}, {"contribution", value}});
            }
            out["rows"] = rows;
            out["total_known"] = b.total_known();
            out["dephasing_bound"] = b.dephasing_bound;
            out["dephasing_bound_ci_edge"] = b.dephasing_bound_ci_edge;
            out["measured_infidelity"] = cfg_in.budget.measured_infidelity;
            write_file(dir / "budget.json", out.dump(2) + "\n");
            write_file(dir / "budget.txt", format_budget_table(b));
            write_sidecar(cfg_in, dir);
            return 0;
        }
        case Experiment::kCalibrateSpacing: {
            RunConfig cfg = cfg_in;
            if (cfg.omega_auto && cfg.gate.pulse.omega_peak <= 0.0) {
                cfg.gate.pulse.omega_peak = kTwoPi * 0.6e6;
            }
            SpacingScanOptions sopts;
            sopts.space = cfg.space;
            sopts.rel_tol = std::min(cfg.rel_tol, 1e-9);
            std::string csv = "mismatch_rad,excitation_quanta\n";
            std::vector<double> xs(cfg.calibration.points);
            std::vector<double> es(cfg.calibration.points);
            for (int i = 0; i < cfg.calibration.points; ++i) {
                xs[i] = cfg.calibration.bracket_lo +
                        (cfg.calibration.bracket_hi - cfg.calibration.bracket_lo) * i /
                            (cfg.calibration.points - 1);
            }
            parallel_for(xs.size(), [&](std::size_t i) {
                es[i] = spacing_excitation(xs[i], cfg.gate, sopts);
            });
            for (std::size_t i = 0; i < xs.size(); ++i) {
                csv += format_double(xs[i]) + "," + format_double(es[i]) + "\n";
            }
            const double recovered = calibrate_spacing(cfg.calibration.bracket_lo,
                                                       cfg.calibration.bracket_hi, cfg.gate, sopts);
            Json out;
            out["recovered_mismatch_rad"] = recovered;
            write_file(dir / "calibrate-spacing.csv", csv);
            write_file(dir / "calibrate-spacing.json", out.dump(2) + "\n");
            write_sidecar(cfg, dir);
            return 0;
        }
    }
    throw ConfigError("unhandled experiment");
}

}  // namespace

int execute(const RunConfig& cfg) { return execute_impl(cfg); }

}  // namespace otdf
