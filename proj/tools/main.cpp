// Command-line front end: validate/run/sweep/list over scenario configs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <variant>

#include "omqd/scenario.hpp"

#ifndef OMQD_SCENARIO_DIR
#define OMQD_SCENARIO_DIR "scenarios"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// machine-readable error summary on stderr, nonzero exit
int fail(const std::string& command, const std::exception& e) {
    json err;
    err["command"] = command;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
}

fs::path resolve_config(const std::string& arg, const fs::path& scenarios_dir) {
    if (fs::exists(arg)) return arg;
    const fs::path builtin = scenarios_dir / (arg + ".json");
    if (fs::exists(builtin)) return builtin;
    throw omqd::ConfigError("no such config file or built-in scenario: " + arg);
}

void apply_overrides(omqd::ScenarioSpec& spec, double dt, double t_end, const std::string& out) {
    if (!out.empty()) spec.output_dir = out;
    const double tau = spec.params.modulation_period();
    if (dt > 0.0) {
        const double ratio = tau / dt;
        const double steps = std::round(ratio);
        if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * ratio)
            throw omqd::ConfigError("incommensurate step: --dt does not divide the period");
        spec.dt = tau / steps;
    }
    if (t_end > 0.0) spec.t_end = std::round(t_end / spec.dt) * spec.dt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for a periodically modulated cavity/mirror/exciton system"};
    app.require_subcommand(1);

    std::string scenarios_dir = OMQD_SCENARIO_DIR;
    app.add_option("--scenarios-dir", scenarios_dir, "Directory with built-in scenario manifests");

    std::string config_arg, out_dir;
    double dt_override = 0.0, t_end_override = 0.0;
    int workers = 1;

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
    validate_cmd->add_option("config", config_arg, "Config file or built-in scenario name")
        ->required();

    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its CSV outputs");
    run_cmd->add_option("config", config_arg, "Config file or built-in scenario name")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    run_cmd->add_option("--dt", dt_override, "Integration step (must divide the period)");
    run_cmd->add_option("--t-end", t_end_override, "End time");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write a summary CSV");
    sweep_cmd->add_option("config", config_arg, "Config file or built-in scenario name")
        ->required();
    sweep_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    sweep_cmd->add_option("--dt", dt_override, "Integration step (must divide the period)");
    sweep_cmd->add_option("--t-end", t_end_override, "End time");
    sweep_cmd->add_option("--workers", workers, "Concurrent scenario evaluations")
        ->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list", "List the built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& entry : omqd::list_scenarios(scenarios_dir)) {
                std::cout << entry.name << (entry.is_sweep ? "  [sweep]" : "") << "\n    "
                          << entry.description << "\n";
            }
            return 0;
        }

        const fs::path config = resolve_config(config_arg, scenarios_dir);
        auto loaded = omqd::load_config(config);

        if (validate_cmd->parsed()) {
            std::cout << "valid: " << config.string() << std::endl;
            return 0;
        }

        if (run_cmd->parsed()) {
            omqd::ScenarioSpec spec = std::holds_alternative<omqd::ScenarioSpec>(loaded)
                                          ? std::get<omqd::ScenarioSpec>(loaded)
                                          : std::get<omqd::SweepSpec>(loaded).base;
            apply_overrides(spec, dt_override, t_end_override, out_dir);
            for (const auto& f : omqd::run_scenario(spec)) std::cout << f.string() << "\n";
            return 0;
        }

        if (sweep_cmd->parsed()) {
            if (!std::holds_alternative<omqd::SweepSpec>(loaded))
                throw omqd::ConfigError("config has no sweep section: " + config.string());
            omqd::SweepSpec spec = std::get<omqd::SweepSpec>(loaded);
            apply_overrides(spec.base, dt_override, t_end_override, out_dir);
            std::cout << omqd::run_sweep(spec, workers).string() << std::endl;
            return 0;
        }
    } catch (const std::exception& e) {
        return fail(app.get_subcommands().front()->get_name(), e);
    }
    return 0;
}
