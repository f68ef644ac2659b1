#include "spinbath/presets.hpp"

#include <sstream>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

const char* state_title(const std::string& s) {
    if (s == "ground") return "ground state";
    if (s == "neel") return "Neel state";
    return "chi = (|up> + 3|down>)/sqrt(10)";
}

std::string strong(const std::string& k, const std::string& state, int n_e, double t_max) {
    std::ostringstream o;
    o << "n_e = " << n_e << "\ni_strength = 20\nk_strength = " << k << "\ninitial_state = " << state
      << "\nreport_basis = computational\nt_min = 0.01\nt_max = " << t_max << "\npoints_per_decade = 25\n";
    return o.str();
}

std::string weak(const std::string& k, const std::string& state, int n_e, double t_max) {
    std::ostringstream o;
    o << "n_e = " << n_e << "\ni_strength = 0.25\nk_strength = " << k << "\ninitial_state = " << state
      << "\nreport_basis = cs_eigen\nt_min = 0.01\nt_max = " << t_max << "\npoints_per_decade = 25\n";
    return o.str();
}

std::vector<Preset> make_presets() {
    std::vector<Preset> out;
    const std::vector<std::string> strong_k{"0.02", "1", "20"};
    const std::vector<std::string> weak_k{"0.02", "0.2", "1"};

    for (const auto& k : strong_k) {
        for (const std::string state : {"ground", "neel", "chi"}) {
            const std::string name = "strong-K" + k + "-" + state;
            out.push_back({name, PresetKind::Experiment,
                           "I = 20, K = " + k + ", " + state_title(state) + ", computational basis",
                           "name = " + name + "\n" + strong(k, state, 12, 200), false});
            out.push_back({name + "-full", PresetKind::Experiment, "as " + name + " with N_E = 16",
                           "name = " + name + "-full\n" + strong(k, state, 16, 200), true});
        }
    }
    for (const auto& k : weak_k) {
        for (const std::string state : {"ground", "neel"}) {
            const std::string name = "weak-K" + k + "-" + state;
            out.push_back({name, PresetKind::Experiment,
                           "I = 0.25, K = " + k + ", " + state_title(state) + ", eigenbasis",
                           "name = " + name + "\n" + weak(k, state, 12, 1000), false});
            out.push_back({name + "-full", PresetKind::Experiment, "as " + name + " with N_E = 16, t_max = 2500",
                           "name = " + name + "-full\n" + weak(k, state, 16, 2500), true});
        }
    }
    for (const auto& k : strong_k) {
        const std::string name = "strong-pair-K" + k;
        out.push_back({name, PresetKind::Experiment, "trace distance, ground vs Neel, I = 20, K = " + k,
                       "name = " + name + "\n" + strong(k, "ground", 12, 200) +
                           "partner_state = neel\noutputs = entropy max_offdiag\n",
                       false});
    }
    for (const auto& k : weak_k) {
        const std::string name = "weak-pair-K" + k;
        out.push_back({name, PresetKind::Experiment, "trace distance, ground vs Neel, I = 0.25, K = " + k,
                       "name = " + name + "\n" + weak(k, "ground", 12, 1000) +
                           "partner_state = neel\noutputs = entropy max_offdiag\n",
                       false});
    }
    // K N_E (N_E - 1) = 24/5 at N_E = 12
    for (const std::string aniso : {"transverse_field", "dipolar"}) {
        const std::string tag = aniso == "transverse_field" ? "field" : "dipolar";
        for (const std::string state : {"ground", "neel", "chi"}) {
            const std::string name = "appendix-b-" + tag + "-" + state;
            out.push_back({name, PresetKind::AppendixB,
                           "I = 20, K N_E(N_E-1) = 4.8, " + aniso + " = 1, " + state_title(state),
                           "name = " + name + "\nn_e = 12\ni_strength = 20\nk_strength = 0.036363636363636362\n"
                           "anisotropy = " + aniso + "\nanisotropy_strength = 1\ninitial_state = " + state +
                           "\nreport_basis = computational\nt_min = 0.01\nt_max = 200\npoints_per_decade = 25\n"
                           "window_t_inf = 180\nwindow_delta_t = 20\n"
                           "outputs = entropy max_offdiag diagonals cs_energy\ndiagonals_all = true\n",
                           false});
        }
    }
    for (const std::string k16 : {"1", "20"}) {
        const std::string c = k16 == "1" ? "240" : "4800";
        const std::string name = "sweep-strong-K" + k16;
        out.push_back({name, PresetKind::Sweep,
                       "finite-size sweep, I = 20, ground state, K(16) = " + k16 + ", N_E = 8..14, 3 seeds",
                       "name = " + name + "\nn_e_values = 8 10 12 14\nk_constraint = " + c +
                           "\nseeds_per_point = 3\ni_strength = 20\ninitial_state = ground\n"
                           "report_basis = computational\nt_min = 0.01\nt_max = 200\npoints_per_decade = 25\n"
                           "window_t_inf = 180\nwindow_delta_t = 20\noutputs = entropy max_offdiag\n",
                       true});
    }
    out.push_back({"sweep-weak-K0.02", PresetKind::Sweep,
                   "finite-size sweep, I = 0.25, Neel state, eigenbasis, K(16) = 0.02, window (4500, 500)",
                   "name = sweep-weak-K0.02\nn_e_values = 4 6 8 10 12\nk_constraint = 4.8\nseeds_per_point = 1\n"
                   "i_strength = 0.25\ninitial_state = neel\nreport_basis = cs_eigen\nt_min = 0.01\nt_max = 5000\n"
                   "points_per_decade = 25\nwindow_t_inf = 4500\nwindow_delta_t = 500\noutputs = entropy max_offdiag\n",
                   true});
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = make_presets();
    return all;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

ExperimentConfig preset_experiment(const std::string& name) {
    const Preset& p = find_preset(name);
    if (p.kind == PresetKind::Sweep) throw ConfigError("preset '" + name + "' is a sweep");
    return parse_experiment_config(p.text);
}

SweepConfig preset_sweep(const std::string& name) {
    const Preset& p = find_preset(name);
    if (p.kind != PresetKind::Sweep) throw ConfigError("preset '" + name + "' is not a sweep");
    return parse_sweep_config(p.text);
}

}  // namespace spinbath
