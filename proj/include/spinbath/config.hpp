#pragma once

// Experiment and sweep configuration in a flat `key = value` text format.
// Blank lines and `#` comments are ignored; unknown or repeated keys are
// errors.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinbath/model.hpp"
#include "spinbath/observables.hpp"

namespace spinbath {

struct AverageWindow {
    double t_inf = 180.0;
    double delta_t = 20.0;
};

// t = 0, a log-spaced grid on [t_min, t_max], and optionally a uniformly
// sampled averaging window; or an explicit list of times.
struct TimeGrid {
    double t_min = 0.01;
    double t_max = 200.0;
    int points_per_decade = 25;
    std::vector<double> explicit_times;
    std::optional<AverageWindow> window;
    int window_points = 101;

    std::vector<double> build() const;
};

enum class WindowMethod { Lanczos, Bound };

struct Outputs {
    bool entropy = true;
    bool max_offdiag = true;
    bool diagonals = true;
    bool cs_energy = false;
    bool offdiag_stats = false;
    bool all_diagonals = false;  // false: only the S^z_tot = 0 (or 1/2) sector
};

struct ExperimentConfig {
    std::string name = "run";
    ModelConfig model;
    InitialState initial_state;
    std::optional<InitialState> partner_state;  // adds trace_distance to this partner
    BasisTag report_basis = BasisTag::Computational;
    TimeGrid grid;
    double epsilon = 1e-12;
    WindowMethod spectral_window = WindowMethod::Lanczos;
    Outputs outputs;

    void validate() const;  // throws ConfigError
    std::string to_text() const;
};

struct SweepConfig {
    ExperimentConfig base;
    std::vector<int> n_e_values;
    double k_constraint = 0.0;  // K = k_constraint / (N_E (N_E - 1))
    AverageWindow window;
    int seeds_per_point = 1;

    void validate() const;
    std::string to_text() const;
};

ExperimentConfig parse_experiment_config(std::string_view text);
SweepConfig parse_sweep_config(std::string_view text);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
SweepConfig load_sweep_config(const std::filesystem::path& path);

// K for a sweep point; K * n_e * (n_e - 1) = constraint.
double constrained_k(double constraint, int n_e);

}  // namespace spinbath
