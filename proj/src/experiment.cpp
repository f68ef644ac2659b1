#include "spinbath/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

constexpr double missing = std::numeric_limits<double>::quiet_NaN();

bool has_anisotropy(const ModelConfig& m) {
    return m.anisotropy.kind != AnisotropyKind::None && m.anisotropy.strength != 0.0;
}

// S^z_CS sectors of the states, or empty when propagation must use all patterns.
std::vector<std::uint32_t> active_patterns(const Model& model, const std::vector<StateVector>& cs_states) {
    const int n_s = model.config.n_s;
    if (!model.anisotropy.empty()) return {};
    std::set<int> counts;
    for (const auto& psi : cs_states) {
        for (std::size_t x = 0; x < psi.size(); ++x) {
            if (psi[x] != cplx{0.0, 0.0}) counts.insert(std::popcount(static_cast<std::uint32_t>(x)));
        }
    }
    if (static_cast<int>(counts.size()) == n_s + 1) return {};
    std::vector<std::uint32_t> patterns;
    for (int c : counts) {
        auto p = patterns_with_up_count(n_s, c);
        patterns.insert(patterns.end(), p.begin(), p.end());
    }
    std::sort(patterns.begin(), patterns.end());
    return patterns;
}

std::string fmt_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

struct DiagonalSelection {
    std::vector<std::string> names;
    std::vector<Eigen::Index> indices;
};

// Columns for rho_ii. By default only the S^z_tot = 0 (odd n_s: +1/2) sector.
DiagonalSelection select_diagonals(const ExperimentConfig& cfg, const std::optional<CsEigenbasis>& basis) {
    const int n_s = cfg.model.n_s;
    const int sector_up = (n_s + 1) / 2;
    DiagonalSelection sel;
    if (!basis) {
        for (std::uint32_t x = 0; x < (1u << n_s); ++x) {
            if (!cfg.outputs.all_diagonals && std::popcount(x) != sector_up) continue;
            sel.names.push_back("diag_" + spin_label(x, n_s));
            sel.indices.push_back(x);
        }
        return sel;
    }
    std::map<std::string, int> seen;
    std::vector<std::string> raw;
    for (std::size_t c = 0; c < basis->labels.size(); ++c) {
        const CsLabel& l = basis->labels[c];
        if (!cfg.outputs.all_diagonals && l.sz.twice != 2 * sector_up - n_s) continue;
        raw.push_back("diag_S" + l.s_tot.str() + "_Sz" + l.sz.str() + "_E" + fmt_label(l.energy));
        ++seen[raw.back()];
        sel.indices.push_back(static_cast<Eigen::Index>(c));
    }
    std::map<std::string, int> used;
    for (const auto& r : raw) sel.names.push_back(seen[r] > 1 ? r + "_" + std::to_string(++used[r]) : r);
    return sel;
}

TimeSeries make_series(const ExperimentConfig& cfg, const Model& model, std::span<const double> grid,
                       std::vector<ReducedDensityMatrix> rdms) {
    std::optional<CsEigenbasis> basis;
    if (cfg.report_basis == BasisTag::CsEigen) basis = build_eigenbasis(model.cs_hat(), cfg.model.n_s);
    const DiagonalSelection diag = select_diagonals(cfg, basis);
    const Eigen::MatrixXcd h_cs = dense_matrix(model.cs_hat(), cfg.model.n_s);

    const std::size_t n = grid.size();
    TimeSeries ts;
    ts.times.assign(grid.begin(), grid.end());
    auto add = [&](const std::string& name) -> std::vector<double>& {
        ts.columns.push_back({name, std::vector<double>(n, missing)});
        return ts.columns.back().values;
    };
    add("entropy");
    add("max_offdiag");
    if (cfg.outputs.diagonals) {
        for (const auto& name : diag.names) add(name);
    }
    add("trace_distance");
    add("cs_energy");
    if (cfg.outputs.offdiag_stats) {
        add("offdiag_mean");
        add("offdiag_std");
    }

    auto col = [&](const std::string& name) -> std::vector<double>& {
        for (auto& c : ts.columns) {
            if (c.name == name) return c.values;
        }
        throw UsageError("no column " + name);
    };
    for (std::size_t k = 0; k < n; ++k) {
        const ReducedDensityMatrix& rho = rdms[k];
        const ReducedDensityMatrix reported = basis ? transform_rdm(rho, *basis) : rho;
        if (cfg.outputs.entropy) col("entropy")[k] = von_neumann_entropy(rho);
        if (cfg.outputs.max_offdiag) col("max_offdiag")[k] = max_off_diagonal(reported);
        if (cfg.outputs.diagonals) {
            for (std::size_t d = 0; d < diag.names.size(); ++d) {
                col(diag.names[d])[k] = reported(diag.indices[d], diag.indices[d]).real();
            }
        }
        if (cfg.outputs.cs_energy) col("cs_energy")[k] = cs_energy(rho, h_cs);
        if (cfg.outputs.offdiag_stats) {
            const OffDiagonalStats s = off_diagonal_stats(reported);
            col("offdiag_mean")[k] = s.mean;
            col("offdiag_std")[k] = s.stddev;
        }
    }
    ts.rdms = std::move(rdms);
    ts.config_text = cfg.to_text();
    return ts;
}

// Everything except the initial state and the name, for pair compatibility.
std::string model_key(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.name.clear();
    c.initial_state = {};
    c.partner_state.reset();
    return c.to_text();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace

bool TimeSeries::has(const std::string& name) const {
    return std::any_of(columns.begin(), columns.end(), [&](const Column& c) { return c.name == name; });
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    for (const auto& c : columns) {
        if (c.name == name) return c.values;
    }
    throw UsageError("time series has no column '" + name + "'");
}

std::vector<std::string> TimeSeries::diagonal_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
        if (c.name.rfind("diag_", 0) == 0) out.push_back(c.name);
    }
    return out;
}

std::string spin_label(std::uint32_t pattern, int n_s) {
    std::string s;
    for (int i = 0; i < n_s; ++i) s += (pattern >> i) & 1u ? 'u' : 'd';
    return s;
}

std::vector<std::vector<ReducedDensityMatrix>> evolve_rdms(const Model& model, const std::vector<StateVector>& cs_states,
                                                            std::span<const double> grid, double epsilon,
                                                            WindowMethod method, RunMetadata* meta) {
    validate_grid(grid);
    const int n_s = model.config.n_s;
    const int n_e = model.config.n_e;
    const int n = n_s + n_e;
    const TermList terms = model.full();
    const std::vector<std::uint32_t> patterns = active_patterns(model, cs_states);
    CompiledHamiltonian ham = patterns.empty() ? CompiledHamiltonian(terms, n, n_s)
                                               : CompiledHamiltonian(terms, n, n_s, patterns);
    const SpectralWindow window = method == WindowMethod::Lanczos ? lanczos_window(ham) : spectral_bound(terms);
    const std::size_t sector_dim = ham.dim();
    Propagator prop(std::move(ham), window, epsilon);

    std::vector<std::vector<ReducedDensityMatrix>> out;
    for (const StateVector& cs : cs_states) {
        std::vector<ReducedDensityMatrix> rdms;
        rdms.reserve(grid.size());
        for_each_checkpoint(prop, product_state(cs, model.env_state), grid,
                            [&](std::size_t, double, const StateVector& psi) {
                                ReducedDensityMatrix rho = reduced_density_matrix(psi, n_s, n_e);
                                rho.check_integrity();
                                rdms.push_back(std::move(rho));
                            });
        out.push_back(std::move(rdms));
    }
    if (meta) {
        meta->seed = model.config.seed;
        meta->checksum = model.checksum();
        meta->window = window;
        meta->sector_dim = sector_dim;
        meta->matvecs = prop.matvec_count();
    }
    return out;
}

namespace {

TimeSeries run_with_partner(const ExperimentConfig& cfg, const std::optional<InitialState>& partner) {
    cfg.validate();
    const Timer timer;
    const Model model = build_model(cfg.model);
    // the ground state is always that of the isotropic ring
    std::vector<StateVector> states{initial_cs_state(cfg.initial_state, cfg.model.n_s, model.cs)};
    if (partner) states.push_back(initial_cs_state(*partner, cfg.model.n_s, model.cs));
    const std::vector<double> grid = cfg.grid.build();

    RunMetadata meta;
    auto rdms = evolve_rdms(model, states, grid, cfg.epsilon, cfg.spectral_window, &meta);
    TimeSeries ts = make_series(cfg, model, grid, std::move(rdms[0]));
    if (partner) {
        for (auto& c : ts.columns) {
            if (c.name != "trace_distance") continue;
            for (std::size_t k = 0; k < grid.size(); ++k) c.values[k] = trace_distance(ts.rdms[k], rdms[1][k]);
        }
    }
    meta.wall_seconds = timer.seconds();
    ts.meta = meta;
    return ts;
}

}  // namespace

TimeSeries run_experiment(const ExperimentConfig& cfg) { return run_with_partner(cfg, cfg.partner_state); }

TimeSeries run_pair(const ExperimentConfig& cfg1, const ExperimentConfig& cfg2) {
    cfg1.validate();
    cfg2.validate();
    if (model_key(cfg1) != model_key(cfg2)) {
        throw UsageError("run_pair: configs differ in more than the initial state");
    }
    return run_with_partner(cfg1, cfg2.initial_state);
}

double SweepResult::log2_slope() const {
    std::vector<double> x, y;
    for (const auto& a : aggregates) {
        if (std::isnan(a.max_offdiag_rel) || !(a.max_offdiag_rel > 0.0)) continue;
        x.push_back(a.n_e);
        y.push_back(std::log2(a.max_offdiag_rel));
    }
    if (x.size() < 2) return missing;
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::uint64_t derive_seed(std::uint64_t base, int n_e, int index) {
    // splitmix64 finalizer over a combination of the inputs
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(n_e) * 1000003ULL +
                                                      static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SweepResult run_size_sweep(const SweepConfig& cfg, const std::function<void(const SweepRow&, const TimeSeries&)>& on_job) {
    cfg.validate();
    SweepResult result;
    for (int n_e : cfg.n_e_values) {
        SweepAggregate agg;
        agg.n_e = n_e;
        agg.k_strength = constrained_k(cfg.k_constraint, n_e);
        double rel_sum = 0.0;
        int rel_count = 0;
        for (int j = 0; j < cfg.seeds_per_point; ++j) {
            ExperimentConfig job = cfg.base;
            job.model.n_e = n_e;
            job.model.k_strength = agg.k_strength;
            job.model.seed = derive_seed(cfg.base.model.seed, n_e, j);
            job.grid.window = cfg.window;
            job.name = cfg.base.name + "-ne" + std::to_string(n_e) + "-s" + std::to_string(j);
            const TimeSeries ts = run_experiment(job);

            SweepRow row;
            row.n_e = n_e;
            row.seed = job.model.seed;
            row.k_strength = agg.k_strength;
            const auto& s = ts.column("entropy");
            const auto& m = ts.column("max_offdiag");
            row.entropy_avg = time_average(s, ts.times, cfg.window.t_inf, cfg.window.delta_t);
            row.max_offdiag_avg = time_average(m, ts.times, cfg.window.t_inf, cfg.window.delta_t);
            row.max_offdiag_0 = m.front();
            row.max_offdiag_rel = row.max_offdiag_0 > 0.0 ? 100.0 * row.max_offdiag_avg / row.max_offdiag_0 : missing;
            if (!std::isnan(row.max_offdiag_rel)) {
                rel_sum += row.max_offdiag_rel;
                ++rel_count;
            }
            agg.entropy_avg += row.entropy_avg;
            ++agg.count;
            result.rows.push_back(row);
            if (on_job) on_job(row, ts);
        }
        agg.entropy_avg /= agg.count;
        agg.max_offdiag_rel = rel_count > 0 ? rel_sum / rel_count : missing;
        result.aggregates.push_back(agg);
    }
    return result;
}

AppendixBResult run_appendix_b(const ExperimentConfig& cfg) {
    if (!has_anisotropy(cfg.model)) throw ConfigError("appendix-b run needs an anisotropy term with nonzero strength");
    if (cfg.report_basis != BasisTag::Computational) {
        throw ConfigError("no simultaneous eigenbasis: appendix-b runs report in the computational basis");
    }
    ExperimentConfig c = cfg;
    if (!c.grid.window) c.grid.window = AverageWindow{180.0, 20.0};
    c.outputs.entropy = true;
    c.outputs.cs_energy = true;
    AppendixBResult r;
    r.series = run_experiment(c);
    const auto& s = r.series.column("entropy");
    const auto& e = r.series.column("cs_energy");
    const AverageWindow w = *c.grid.window;
    r.entropy_avg = time_average(s, r.series.times, w.t_inf, w.delta_t);
    r.energy_0 = e.front();
    r.delta_energy = time_average(e, r.series.times, w.t_inf, w.delta_t) - r.energy_0;
    return r;
}

}  // namespace spinbath
