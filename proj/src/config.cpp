#include "spinbath/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Key/value pairs of one file; every key must be consumed.
class Entries {
public:
    explicit Entries(std::string_view text) {
        int line_no = 0;
        std::istringstream in{std::string(text)};
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            const std::string body = trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            const std::string key = trim(std::string_view(body).substr(0, eq));
            const std::string value = trim(std::string_view(body).substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
            if (!values_.emplace(key, Item{value, line_no}).second) {
                throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
            }
        }
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        std::string v = it->second.value;
        values_.erase(it);
        return v;
    }

    void ensure_consumed() const {
        if (values_.empty()) return;
        const auto& [key, item] = *values_.begin();
        throw ConfigError("line " + std::to_string(item.line) + ": unknown key '" + key + "'");
    }

private:
    struct Item {
        std::string value;
        int line;
    };
    std::map<std::string, Item> values_;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw ConfigError(key + ": '" + v + "' is not a number");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

// "re" or "re:im"
cplx to_complex(const std::string& key, const std::string& v) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) return {to_double(key, v), 0.0};
    return {to_double(key, v.substr(0, colon)), to_double(key, v.substr(colon + 1))};
}

template <class F>
void with(Entries& e, const std::string& key, F&& f) {
    if (auto v = e.take(key)) f(*v);
}

void read_experiment(Entries& e, ExperimentConfig& c) {
    with(e, "name", [&](const std::string& v) { c.name = v; });
    with(e, "n_s", [&](const std::string& v) { c.model.n_s = static_cast<int>(to_int("n_s", v)); });
    with(e, "n_e", [&](const std::string& v) { c.model.n_e = static_cast<int>(to_int("n_e", v)); });
    with(e, "j_s", [&](const std::string& v) { c.model.j_s = to_double("j_s", v); });
    with(e, "i_strength", [&](const std::string& v) { c.model.i_strength = to_double("i_strength", v); });
    with(e, "k_strength", [&](const std::string& v) { c.model.k_strength = to_double("k_strength", v); });
    with(e, "seed", [&](const std::string& v) {
        const long long s = to_int("seed", v);
        if (s < 0) throw ConfigError("seed must be non-negative");
        c.model.seed = static_cast<std::uint64_t>(s);
    });
    with(e, "anisotropy", [&](const std::string& v) {
        if (v == "none") c.model.anisotropy.kind = AnisotropyKind::None;
        else if (v == "transverse_field") c.model.anisotropy.kind = AnisotropyKind::TransverseField;
        else if (v == "dipolar") c.model.anisotropy.kind = AnisotropyKind::Dipolar;
        else throw ConfigError("anisotropy: expected none|transverse_field|dipolar, got '" + v + "'");
    });
    with(e, "anisotropy_strength",
         [&](const std::string& v) { c.model.anisotropy.strength = to_double("anisotropy_strength", v); });

    std::optional<std::string> custom = e.take("custom_amplitudes");
    with(e, "initial_state", [&](const std::string& v) {
        if (v == "custom") {
            c.initial_state.kind = InitialStateKind::Custom;
        } else {
            c.initial_state = InitialState::parse(v);
        }
    });
    if (c.initial_state.kind == InitialStateKind::Custom) {
        if (!custom) throw ConfigError("initial_state = custom needs custom_amplitudes");
        for (const auto& w : split_ws(*custom)) c.initial_state.amplitudes.push_back(to_complex("custom_amplitudes", w));
    } else if (custom) {
        throw ConfigError("custom_amplitudes given but initial_state is not custom");
    }
    with(e, "partner_state", [&](const std::string& v) { c.partner_state = InitialState::parse(v); });

    with(e, "report_basis", [&](const std::string& v) {
        if (v == "computational") c.report_basis = BasisTag::Computational;
        else if (v == "cs_eigen") c.report_basis = BasisTag::CsEigen;
        else throw ConfigError("report_basis: expected computational|cs_eigen, got '" + v + "'");
    });

    with(e, "t_min", [&](const std::string& v) { c.grid.t_min = to_double("t_min", v); });
    with(e, "t_max", [&](const std::string& v) { c.grid.t_max = to_double("t_max", v); });
    with(e, "points_per_decade",
         [&](const std::string& v) { c.grid.points_per_decade = static_cast<int>(to_int("points_per_decade", v)); });
    with(e, "times", [&](const std::string& v) {
        for (const auto& w : split_ws(v)) c.grid.explicit_times.push_back(to_double("times", w));
        if (c.grid.explicit_times.empty()) throw ConfigError("times: empty list");
    });
    std::optional<std::string> t_inf = e.take("window_t_inf"), delta = e.take("window_delta_t");
    if (t_inf.has_value() != delta.has_value()) throw ConfigError("window_t_inf and window_delta_t go together");
    if (t_inf) c.grid.window = AverageWindow{to_double("window_t_inf", *t_inf), to_double("window_delta_t", *delta)};
    with(e, "window_points",
         [&](const std::string& v) { c.grid.window_points = static_cast<int>(to_int("window_points", v)); });

    with(e, "epsilon", [&](const std::string& v) { c.epsilon = to_double("epsilon", v); });
    with(e, "spectral_window", [&](const std::string& v) {
        if (v == "lanczos") c.spectral_window = WindowMethod::Lanczos;
        else if (v == "bound") c.spectral_window = WindowMethod::Bound;
        else throw ConfigError("spectral_window: expected lanczos|bound, got '" + v + "'");
    });

    with(e, "outputs", [&](const std::string& v) {
        c.outputs = Outputs{false, false, false, false, false, c.outputs.all_diagonals};
        for (const auto& w : split_ws(v)) {
            if (w == "entropy") c.outputs.entropy = true;
            else if (w == "max_offdiag") c.outputs.max_offdiag = true;
            else if (w == "diagonals") c.outputs.diagonals = true;
            else if (w == "cs_energy") c.outputs.cs_energy = true;
            else if (w == "offdiag_stats") c.outputs.offdiag_stats = true;
            else throw ConfigError("outputs: unknown flag '" + w + "'");
        }
    });
    with(e, "diagonals_all", [&](const std::string& v) { c.outputs.all_diagonals = to_bool("diagonals_all", v); });
}

std::string anisotropy_name(AnisotropyKind k) {
    switch (k) {
    case AnisotropyKind::None: return "none";
    case AnisotropyKind::TransverseField: return "transverse_field";
    case AnisotropyKind::Dipolar: return "dipolar";
    }
    return "none";
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
    return s;
}

}  // namespace

std::vector<double> TimeGrid::build() const {
    std::vector<double> t{0.0};
    if (!explicit_times.empty()) {
        t.insert(t.end(), explicit_times.begin(), explicit_times.end());
    } else {
        const double decades = std::log10(t_max / t_min);
        const int n = static_cast<int>(std::ceil(decades * points_per_decade - 1e-9));
        for (int k = 0; k <= n; ++k) t.push_back(std::min(t_max, t_min * std::pow(10.0, double(k) / points_per_decade)));
    }
    if (window) {
        for (int k = 0; k < window_points; ++k) {
            t.push_back(window->t_inf + window->delta_t * k / (window_points - 1));
        }
    }
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double x : t) {
        if (out.empty() || x - out.back() > 1e-9 * std::max(1.0, x)) out.push_back(x);
    }
    return out;
}

void ExperimentConfig::validate() const {
    model.validate();
    if (model.n_s > 8) throw ConfigError("n_s must be <= 8");
    if (!(epsilon > 0.0 && epsilon <= 1e-6)) throw ConfigError("epsilon must lie in (0, 1e-6]");
    if (initial_state.kind == InitialStateKind::Custom &&
        initial_state.amplitudes.size() != (std::size_t{1} << model.n_s)) {
        throw ConfigError("custom_amplitudes needs 2^n_s = " + std::to_string(1 << model.n_s) + " entries");
    }
    if (grid.explicit_times.empty()) {
        if (!(grid.t_min > 0.0 && grid.t_max >= grid.t_min)) throw ConfigError("need 0 < t_min <= t_max");
        if (grid.points_per_decade < 1 || grid.points_per_decade > 1000) throw ConfigError("points_per_decade out of range");
    } else {
        for (double t : grid.explicit_times) {
            if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("times must be finite and non-negative");
        }
        if (!std::is_sorted(grid.explicit_times.begin(), grid.explicit_times.end())) {
            throw ConfigError("times must be ascending");
        }
    }
    const double t_end = grid.explicit_times.empty() ? grid.t_max : grid.explicit_times.back();
    if (!std::isfinite(t_end) || t_end > 1e6) throw ConfigError("final time must be finite and at most 1e6");
    if (grid.window) {
        if (!(grid.window->t_inf >= 0.0 && grid.window->delta_t > 0.0)) throw ConfigError("bad averaging window");
        if (grid.window_points < 50) throw ConfigError("window_points must be at least 50");
    }
    if (report_basis == BasisTag::CsEigen && model.anisotropy.kind != AnisotropyKind::None &&
        model.anisotropy.strength != 0.0) {
        throw ConfigError("no simultaneous eigenbasis: report_basis = cs_eigen with anisotropy");
    }
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream o;
    o << "name = " << name << "\n";
    o << "n_s = " << model.n_s << "\n";
    o << "n_e = " << model.n_e << "\n";
    o << "j_s = " << fmt(model.j_s) << "\n";
    o << "i_strength = " << fmt(model.i_strength) << "\n";
    o << "k_strength = " << fmt(model.k_strength) << "\n";
    o << "anisotropy = " << anisotropy_name(model.anisotropy.kind) << "\n";
    o << "anisotropy_strength = " << fmt(model.anisotropy.strength) << "\n";
    o << "seed = " << model.seed << "\n";
    o << "initial_state = " << initial_state.name() << "\n";
    if (initial_state.kind == InitialStateKind::Custom) {
        o << "custom_amplitudes =";
        for (const cplx& a : initial_state.amplitudes) o << " " << fmt(a.real()) << ":" << fmt(a.imag());
        o << "\n";
    }
    if (partner_state) o << "partner_state = " << partner_state->name() << "\n";
    o << "report_basis = " << to_string(report_basis) << "\n";
    if (grid.explicit_times.empty()) {
        o << "t_min = " << fmt(grid.t_min) << "\n";
        o << "t_max = " << fmt(grid.t_max) << "\n";
        o << "points_per_decade = " << grid.points_per_decade << "\n";
    } else {
        o << "times = " << join(grid.explicit_times) << "\n";
    }
    if (grid.window) {
        o << "window_t_inf = " << fmt(grid.window->t_inf) << "\n";
        o << "window_delta_t = " << fmt(grid.window->delta_t) << "\n";
        o << "window_points = " << grid.window_points << "\n";
    }
    o << "epsilon = " << fmt(epsilon) << "\n";
    o << "spectral_window = " << (spectral_window == WindowMethod::Lanczos ? "lanczos" : "bound") << "\n";
    std::string flags;
    auto add = [&](bool on, const char* n) {
        if (on) flags += (flags.empty() ? "" : " ") + std::string(n);
    };
    add(outputs.entropy, "entropy");
    add(outputs.max_offdiag, "max_offdiag");
    add(outputs.diagonals, "diagonals");
    add(outputs.cs_energy, "cs_energy");
    add(outputs.offdiag_stats, "offdiag_stats");
    o << "outputs = " << flags << "\n";
    o << "diagonals_all = " << (outputs.all_diagonals ? "true" : "false") << "\n";
    return o.str();
}

void SweepConfig::validate() const {
    if (n_e_values.empty()) throw ConfigError("n_e_values must not be empty");
    if (!(k_constraint >= 0.0) || !std::isfinite(k_constraint)) throw ConfigError("k_constraint must be finite and >= 0");
    if (seeds_per_point < 1) throw ConfigError("seeds_per_point must be >= 1");
    if (!(window.t_inf >= 0.0 && window.delta_t > 0.0)) throw ConfigError("bad averaging window");
    for (int n_e : n_e_values) {
        if (n_e < 2) throw ConfigError("sweep n_e values must be >= 2");
        ExperimentConfig c = base;
        c.model.n_e = n_e;
        c.model.k_strength = constrained_k(k_constraint, n_e);
        c.validate();
    }
}

std::string SweepConfig::to_text() const {
    std::ostringstream o;
    std::string base_text = base.to_text();
    // the sweep owns n_e, k_strength and the averaging window
    std::istringstream in(base_text);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("n_e =", 0) == 0 || line.rfind("k_strength =", 0) == 0 || line.rfind("window_", 0) == 0) continue;
        o << line << "\n";
    }
    o << "n_e_values =";
    for (int n : n_e_values) o << " " << n;
    o << "\n";
    o << "k_constraint = " << fmt(k_constraint) << "\n";
    o << "window_t_inf = " << fmt(window.t_inf) << "\n";
    o << "window_delta_t = " << fmt(window.delta_t) << "\n";
    o << "window_points = " << base.grid.window_points << "\n";
    o << "seeds_per_point = " << seeds_per_point << "\n";
    return o.str();
}

ExperimentConfig parse_experiment_config(std::string_view text) {
    Entries e(text);
    ExperimentConfig c;
    read_experiment(e, c);
    e.ensure_consumed();
    c.validate();
    return c;
}

SweepConfig parse_sweep_config(std::string_view text) {
    Entries e(text);
    SweepConfig s;
    std::optional<std::string> values = e.take("n_e_values"), constraint = e.take("k_constraint"),
                               seeds = e.take("seeds_per_point");
    if (!values) throw ConfigError("sweep needs n_e_values");
    if (!constraint) throw ConfigError("sweep needs k_constraint");
    if (e.take("n_e") || e.take("k_strength")) throw ConfigError("a sweep sets n_e and k_strength itself");
    for (const auto& w : split_ws(*values)) s.n_e_values.push_back(static_cast<int>(to_int("n_e_values", w)));
    s.k_constraint = to_double("k_constraint", *constraint);
    if (seeds) s.seeds_per_point = static_cast<int>(to_int("seeds_per_point", *seeds));
    read_experiment(e, s.base);
    e.ensure_consumed();
    if (!s.base.grid.window) throw ConfigError("sweep needs window_t_inf and window_delta_t");
    s.window = *s.base.grid.window;
    s.validate();
    return s;
}

namespace {
std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}
}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(slurp(path));
}

SweepConfig load_sweep_config(const std::filesystem::path& path) { return parse_sweep_config(slurp(path)); }

double constrained_k(double constraint, int n_e) {
    if (n_e < 2) throw ConfigError("constrained_k: n_e must be >= 2");
    return constraint / (static_cast<double>(n_e) * (n_e - 1));
}

}  // namespace spinbath
