// spinbath: run configured experiments, sweeps and the oracle suite.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical
// integrity error, 3 oracle failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "spinbath/config.hpp"
#include "spinbath/csv.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/experiment.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/presets.hpp"

namespace fs = std::filesystem;
using namespace spinbath;

namespace {

// A path to a config file, or the name of a preset.
ExperimentConfig load_experiment(const std::string& arg) {
    if (fs::exists(arg)) return load_experiment_config(arg);
    return preset_experiment(arg);
}

SweepConfig load_sweep(const std::string& arg) {
    if (fs::exists(arg)) return load_sweep_config(arg);
    return preset_sweep(arg);
}

// Writes to DIR/<file> when an output directory is set, else to stdout.
template <class F>
void emit(const std::string& out_dir, const std::string& file, F&& write) {
    if (out_dir.empty()) {
        write(std::cout);
        return;
    }
    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / file;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    write(out);
    std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Central spin system coupled to a random spin bath"};
    app.require_subcommand(1);

    std::string config, config2, out_dir;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run one experiment and write its time series");
    run->add_option("config", config, "config file or preset name")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "output directory (default: stdout)");

    auto* pair = app.add_subcommand("pair", "Trace distance between two runs that differ only in the initial state");
    pair->add_option("config1", config, "first config")->required();
    pair->add_option("config2", config2, "second config")->required();
    pair->add_option("--seed", seed, "override both seeds");
    pair->add_option("--out", out_dir, "output directory (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Finite-size sweep at fixed K N_E (N_E - 1)");
    sweep->add_option("sweep", config, "sweep file or preset name")->required();
    sweep->add_option("--seed", seed, "override the base seed");
    sweep->add_option("--out", out_dir, "directory for per-job CSVs and the sweep table (default: table on stdout)");

    auto* appb = app.add_subcommand("appendix-b", "Run with an S^z-breaking anisotropy and track the CS energy");
    appb->add_option("config", config, "config file or preset name")->required();
    appb->add_option("--seed", seed, "override the config seed");
    appb->add_option("--out", out_dir, "output directory (default: stdout)");

    auto* oracle = app.add_subcommand("oracle", "Run the small-instance oracle suite");
    std::uint64_t oracle_seed = 1;
    bool mutate = false;
    oracle->add_option("--seed", oracle_seed, "seed for the random instances");
    oracle->add_flag("--mutate", mutate, "negate the CS-environment couplings in the fast path (suite must fail)");

    auto* pre = app.add_subcommand("presets", "List or show named configurations");
    pre->require_subcommand(1);
    auto* pre_list = pre->add_subcommand("list", "List preset names");
    auto* pre_show = pre->add_subcommand("show", "Print a preset as a config file");
    std::string preset_name;
    pre_show->add_option("name", preset_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            ExperimentConfig cfg = load_experiment(config);
            if (seed) cfg.model.seed = *seed;
            const TimeSeries ts = run_experiment(cfg);
            emit(out_dir, cfg.name + ".csv", [&](std::ostream& o) { write_time_series(o, ts); });
        } else if (*pair) {
            ExperimentConfig c1 = load_experiment(config), c2 = load_experiment(config2);
            if (seed) c1.model.seed = c2.model.seed = *seed;
            const TimeSeries ts = run_pair(c1, c2);
            emit(out_dir, c1.name + "-vs-" + c2.initial_state.name() + ".csv", [&](std::ostream& o) {
                write_time_series(o, ts, {"partner_state: " + c2.initial_state.name()});
            });
        } else if (*sweep) {
            SweepConfig cfg = load_sweep(config);
            if (seed) cfg.base.model.seed = *seed;
            const SweepResult result = run_size_sweep(cfg, [&](const SweepRow& row, const TimeSeries& ts) {
                std::cerr << "n_e=" << row.n_e << " seed=" << row.seed << " S=" << format_value(row.entropy_avg)
                          << " M_R=" << format_value(row.max_offdiag_rel) << " (" << format_value(ts.meta.wall_seconds)
                          << " s)\n";
                if (!out_dir.empty()) {
                    emit(out_dir, cfg.base.name + "-ne" + std::to_string(row.n_e) + "-seed" + std::to_string(row.seed) + ".csv",
                         [&](std::ostream& o) { write_time_series(o, ts); });
                }
            });
            emit(out_dir, cfg.base.name + "-sweep.csv", [&](std::ostream& o) { write_sweep(o, cfg, result); });
        } else if (*appb) {
            ExperimentConfig cfg = load_experiment(config);
            if (seed) cfg.model.seed = *seed;
            const AppendixBResult r = run_appendix_b(cfg);
            emit(out_dir, cfg.name + ".csv", [&](std::ostream& o) {
                write_time_series(o, r.series,
                                  {"entropy_avg: " + format_value(r.entropy_avg), "energy_0: " + format_value(r.energy_0),
                                   "delta_energy: " + format_value(r.delta_energy)});
            });
        } else if (*oracle) {
            const OracleReport report = run_oracle_suite({oracle_seed, mutate});
            for (const auto& c : report.checks) {
                std::printf("%-28s %s  deviation %.3e  tolerance %.1e\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                            c.deviation, c.tolerance);
            }
            std::printf("oracle suite %s in %.2f s\n", report.passed() ? "passed" : "FAILED", report.seconds);
            return report.passed() ? 0 : 3;
        } else if (*pre_list) {
            for (const auto& p : presets()) {
                std::printf("%-28s %s%s\n", p.name.c_str(), p.description.c_str(), p.long_running ? " [long-running]" : "");
            }
        } else if (*pre_show) {
            std::cout << find_preset(preset_name).text;
        }
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
