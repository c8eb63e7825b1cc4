// qkr <experiment> --config <file> [overrides]

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qkr/experiments.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Quantum kicked rotor experiment runner"};
    app.set_version_flag("--version", std::string(qkr::version));

    std::string experiment;
    std::string config_path;
    std::optional<std::string> ell, kick, kicks, seed, out;
    std::vector<std::string> sets;

    std::vector<std::string> names;
    for (const auto& [e, n] : qkr::experiment_names())
        names.push_back(n);
    app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
    app.add_option("--config,-c", config_path, "key = value configuration file");
    app.add_option("--ell", ell, "Grid side(s), comma separated");
    app.add_option("--K", kick, "Kick strength(s): list or start:stop:step");
    app.add_option("--kicks", kicks, "Number of kicks");
    app.add_option("--seed", seed, "64-bit seed");
    app.add_option("--out,-o", out, "Output directory");
    app.add_option("--set", sets, "Extra key=value setting (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        const qkr::Experiment e = qkr::parse_experiment(experiment);
        std::map<std::string, std::string> settings;
        if (!config_path.empty())
            settings = qkr::io::read_key_value_file(config_path);
        for (const std::string& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw qkr::Error("--set expects key=value, got '" + s + "'");
            settings[qkr::io::trim(s.substr(0, eq))] = qkr::io::trim(s.substr(eq + 1));
        }
        if (ell)
            settings["ell"] = *ell;
        if (kick)
            settings["K"] = *kick;
        if (kicks)
            settings["kicks"] = *kicks;
        if (seed)
            settings["seed"] = *seed;
        if (out) {
            settings.erase("out");
            settings["output_dir"] = *out;
        }
        const qkr::ExperimentConfig cfg = qkr::make_config(e, settings);
        for (const auto& path : qkr::run_experiment(cfg))
            std::cout << path.string() << '\n';
    } catch (const std::exception& ex) {
        std::cerr << "qkr: error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
