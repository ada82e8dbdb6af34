#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "otdf/errors.hpp"
#include "otdf/runconfig.hpp"
#include "otdf/version.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numeric failure, 4 statistics
// failure. Failures emit a single machine-readable JSON line on stderr.
int fail(int code, const char* kind, const std::string& what) {
    nlohmann::json err;
    err["error"] = {{"kind", kind}, {"message", what}, {"exit_code", code}};
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-ion optical-dipole-force entangling gate simulator and analysis tool"};
    app.set_version_flag("--version", std::string(otdf::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string preset = "ca40-2021";
    std::optional<std::uint64_t> seed;

    const char* subcommands[] = {"detuning-scan", "parity-scan",       "bell-run", "fit-histogram",
                                 "bootstrap",     "calibrate-spacing", "budget"};
    for (const char* name : subcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_dir, "output directory (default from config)");
        sub->add_option("--seed", seed, "override statistics.seed");
        sub->add_option("--preset", preset, "parameter preset (ca40-2021)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        nlohmann::json raw = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw otdf::ConfigError("cannot open config file: " + config_path);
            try {
                in >> raw;
            } catch (const nlohmann::json::exception& e) {
                throw otdf::ConfigError(std::string("config JSON parse error: ") + e.what());
            }
        }
        if (raw.contains("experiment")) {
            if (raw["experiment"].get<std::string>() != sub) {
                throw otdf::ConfigError("config experiment \"" +
                                        raw["experiment"].get<std::string>() +
                                        "\" does not match subcommand \"" + sub + "\"");
            }
        } else {
            raw["experiment"] = sub;
        }
        if (!preset.empty()) {
            if (raw.contains("preset") && raw["preset"].get<std::string>() != preset) {
                throw otdf::ConfigError("config preset does not match --preset");
            }
            raw["preset"] = preset;
        }

        otdf::RunConfig cfg = otdf::validate_config(raw);
        if (seed) cfg.stats.seed = *seed;
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        return otdf::execute(cfg);
    } catch (const otdf::ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const otdf::NumericError& e) {
        return fail(3, "numeric", e.what());
    } catch (const otdf::StatsError& e) {
        return fail(4, "statistics", e.what());
    } catch (const std::exception& e) {
        return fail(3, "internal", e.what());
    }
}
