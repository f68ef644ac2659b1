#pragma once

// Configured runs: single trajectories, pairs, finite-size sweeps and the
// anisotropic (S^z-breaking) variants.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinbath/config.hpp"
#include "spinbath/csbasis.hpp"
#include "spinbath/model.hpp"
#include "spinbath/observables.hpp"
#include "spinbath/propagator.hpp"

namespace spinbath {

struct RunMetadata {
    std::uint64_t seed = 0;
    std::uint64_t checksum = 0;
    SpectralWindow window;
    std::size_t sector_dim = 0;  // amplitudes actually propagated
    std::size_t matvecs = 0;
    double wall_seconds = 0.0;
};

// Columns sampled on a time grid. NaN marks a missing value.
struct TimeSeries {
    struct Column {
        std::string name;
        std::vector<double> values;
    };

    std::vector<double> times;
    std::vector<Column> columns;  // entropy, max_offdiag, diag_*, trace_distance, cs_energy, ...
    std::vector<ReducedDensityMatrix> rdms;  // computational basis, one per time
    RunMetadata meta;
    std::string config_text;

    bool has(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;  // throws UsageError
    std::vector<std::string> diagonal_names() const;
};

// Propagates each CS state (times the model's environment state) under the
// model's full Hamiltonian and returns the computational-basis RDM at every
// grid point, one list per state. Without anisotropy the propagation is
// restricted to the S^z_CS sectors the states occupy. Every RDM is checked
// for Hermiticity, unit trace and positivity.
std::vector<std::vector<ReducedDensityMatrix>> evolve_rdms(const Model& model, const std::vector<StateVector>& cs_states,
                                                            std::span<const double> grid, double epsilon,
                                                            WindowMethod method, RunMetadata* meta = nullptr);

TimeSeries run_experiment(const ExperimentConfig& cfg);

// Both configs must agree on everything except the initial state (and name);
// the result is cfg1's series with trace_distance filled in.
TimeSeries run_pair(const ExperimentConfig& cfg1, const ExperimentConfig& cfg2);

struct SweepRow {
    int n_e = 0;
    std::uint64_t seed = 0;
    double k_strength = 0.0;
    double entropy_avg = 0.0;      // S over the window
    double max_offdiag_avg = 0.0;  // M over the window
    double max_offdiag_0 = 0.0;    // M(0)
    double max_offdiag_rel = 0.0;  // 100 * M_avg / M(0); NaN if M(0) = 0
};

struct SweepAggregate {
    int n_e = 0;
    double k_strength = 0.0;
    int count = 0;
    double entropy_avg = 0.0;
    double max_offdiag_rel = 0.0;  // mean over seeds with M(0) > 0; NaN if none
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepAggregate> aggregates;

    // Least-squares slope of log2(mean M_R) against n_e.
    double log2_slope() const;
};

// Seed of job `index` at environment size n_e, mixed from the base seed.
std::uint64_t derive_seed(std::uint64_t base, int n_e, int index);

SweepResult run_size_sweep(const SweepConfig& cfg,
                           const std::function<void(const SweepRow&, const TimeSeries&)>& on_job = {});

struct AppendixBResult {
    TimeSeries series;
    double entropy_avg = 0.0;   // S over the window
    double energy_0 = 0.0;      // E(0)
    double delta_energy = 0.0;  // E over the window minus E(0)
};

// Requires an anisotropy term and the computational basis; uses the window
// (180, 20) unless the config sets one.
AppendixBResult run_appendix_b(const ExperimentConfig& cfg);

// 'u'/'d' per CS site, site 0 first.
std::string spin_label(std::uint32_t pattern, int n_s);

}  // namespace spinbath
