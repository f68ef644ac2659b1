#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "spinbath/config.hpp"
#include "spinbath/csv.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/experiment.hpp"
#include "spinbath/oracle.hpp"
#include "spinbath/presets.hpp"

using namespace spinbath;

namespace {

const char* small_text =
    "name = small\n"
    "n_e = 4\n"
    "i_strength = 20\n"
    "k_strength = 1\n"
    "initial_state = neel\n"
    "t_min = 0.1\n"
    "t_max = 5\n"
    "points_per_decade = 4\n";

std::string csv_of(const TimeSeries& ts) {
    std::ostringstream o;
    write_time_series(o, ts);
    std::string out, line;
    std::istringstream in(o.str());
    while (std::getline(in, line))
        if (line.rfind("# wall_time_s", 0) != 0) out += line + "\n";
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_experiment_config(small_text);
    CHECK(c.name == "small");
    CHECK(c.model.n_e == 4);
    CHECK(c.model.i_strength == 20.0);
    CHECK(c.initial_state.kind == InitialStateKind::Neel);

    CHECK_THROWS_AS(parse_experiment_config("n_e = 4\nn_e = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("n_e 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("n_e = four\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("k_strength = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("epsilon = 1e-3\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("window_t_inf = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("initial_state = custom\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("anisotropy = transverse_field\nanisotropy_strength = 1\n"
                                            "report_basis = cs_eigen\n"),
                    ConfigError);
    try {
        parse_experiment_config("# comment\n\nn_e = 4\nwhat = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("config to_text round trip") {
    const ExperimentConfig c = parse_experiment_config(std::string(small_text) +
                                                       "seed = 17\nwindow_t_inf = 3\nwindow_delta_t = 1\n");
    const ExperimentConfig d = parse_experiment_config(c.to_text());
    CHECK(d.to_text() == c.to_text());
    CHECK(d.model.seed == 17);
    CHECK(d.grid.window.has_value());

    CHECK_THROWS_AS(parse_experiment_config(std::string(small_text) + "custom_amplitudes = 1 0\n"), ConfigError);
    const ExperimentConfig custom = parse_experiment_config(
        "n_e = 2\ninitial_state = custom\ncustom_amplitudes = 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.5:0.25\n");
    CHECK(custom.initial_state.amplitudes.back() == cplx(0.5, 0.25));
}

TEST_CASE("time grid") {
    TimeGrid g;
    g.t_min = 0.01;
    g.t_max = 100;
    g.points_per_decade = 10;
    const auto t = g.build();
    CHECK(t.front() == 0.0);
    CHECK(t[1] == doctest::Approx(0.01));
    CHECK(t.back() == doctest::Approx(100.0));
    CHECK(t.size() == 42);
    g.window = AverageWindow{90, 10};
    const auto w = g.build();
    for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k] > w[k - 1]);
    CHECK(std::count_if(w.begin(), w.end(), [](double x) { return x >= 90 && x <= 100; }) >= 101);
    CHECK(constrained_k(4.8, 12) == doctest::Approx(4.8 / 132));
}

TEST_CASE("presets") {
    int strong = 0, weak = 0;
    for (const auto& p : presets()) {
        if (p.kind == PresetKind::Sweep) {
            CHECK_NOTHROW(preset_sweep(p.name));
            continue;
        }
        const ExperimentConfig c = preset_experiment(p.name);
        CHECK_NOTHROW(c.validate());
        if (p.long_running || c.partner_state) continue;
        if (p.name.rfind("strong-", 0) == 0) ++strong;
        if (p.name.rfind("weak-", 0) == 0) ++weak;
    }
    CHECK(strong == 9);
    CHECK(weak == 6);
    CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
    CHECK(preset_experiment("weak-K0.2-neel").report_basis == BasisTag::CsEigen);
    CHECK(preset_experiment("strong-K20-chi").model.i_strength == 20.0);
}

TEST_CASE("run produces consistent columns and deterministic CSV") {
    const ExperimentConfig c = parse_experiment_config(small_text);
    const TimeSeries a = run_experiment(c), b = run_experiment(c);
    CHECK(csv_of(a) == csv_of(b));
    REQUIRE(a.has("entropy"));
    REQUIRE(a.has("diag_udud"));
    CHECK(a.column("entropy").front() == doctest::Approx(0.0));
    CHECK(a.column("diag_udud").front() == doctest::Approx(1.0));
    CHECK(a.diagonal_names().size() == 6);
    CHECK_THROWS_AS(a.column("nope"), UsageError);
    CHECK(a.rdms.size() == a.times.size());

    const std::string text = csv_of(a);
    CHECK(text.find("# realization_checksum: 0x") != std::string::npos);
    CHECK(text.find("t,entropy,max_offdiag,diag_") != std::string::npos);
}

TEST_CASE("csv formatting") {
    CHECK(format_value(NAN) == "");
    CHECK(format_value(-0.0) == "0");
    CHECK(format_value(0.1) == "0.1");
    CHECK(format_value(1.0 / 3.0) == "0.333333333333");

    TimeSeries ts;
    ts.times = {0.0, 1.0};
    ts.columns.push_back({"x", {1.5, NAN}});
    std::ostringstream o;
    write_time_series(o, ts);
    CHECK(o.str().find("\n1,\n") != std::string::npos);
}

TEST_CASE("eigenbasis runs are labelled by quantum numbers") {
    ExperimentConfig c = parse_experiment_config(small_text);
    c.report_basis = BasisTag::CsEigen;
    c.model.i_strength = 0.25;
    const TimeSeries ts = run_experiment(c);
    const auto names = ts.diagonal_names();
    CHECK(names.size() == 6);
    CHECK(names.front() == "diag_S0_Sz0_E-2");
    double total = 0;
    for (const auto& n : names) total += ts.column(n).front();
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("pairs") {
    ExperimentConfig c = parse_experiment_config(small_text);
    const TimeSeries same = run_pair(c, c);
    for (double d : same.column("trace_distance")) CHECK(std::abs(d) < 1e-12);

    ExperimentConfig g = c;
    g.initial_state = InitialState::parse("ground");
    const TimeSeries p = run_pair(g, c);
    CHECK(p.column("trace_distance").front() == doctest::Approx(std::sqrt(2.0 / 3.0)));

    ExperimentConfig other = c;
    other.model.k_strength = 2.0;
    CHECK_THROWS_AS(run_pair(c, other), UsageError);
}

TEST_CASE("size sweep") {
    const SweepConfig s = parse_sweep_config(
        "name = tiny\nn_e_values = 3 4\nk_constraint = 4.8\nseeds_per_point = 2\ni_strength = 20\n"
        "initial_state = ground\nt_min = 0.1\nt_max = 6\npoints_per_decade = 4\n"
        "window_t_inf = 4\nwindow_delta_t = 2\noutputs = entropy max_offdiag\n");
    int jobs = 0;
    const SweepResult r = run_size_sweep(s, [&](const SweepRow&, const TimeSeries&) { ++jobs; });
    CHECK(jobs == 4);
    REQUIRE(r.rows.size() == 4);
    REQUIRE(r.aggregates.size() == 2);
    CHECK(r.rows[0].k_strength == doctest::Approx(0.8));
    CHECK(r.rows[2].k_strength == doctest::Approx(0.4));
    CHECK(r.rows[0].seed != r.rows[1].seed);
    for (const auto& row : r.rows) CHECK(std::isfinite(row.max_offdiag_rel));
    CHECK(std::isfinite(r.log2_slope()));

    std::ostringstream o;
    write_sweep(o, s, r);
    CHECK(o.str().find("row,n_e,seed,k_strength") != std::string::npos);

    // Neel has no off-diagonal weight at t = 0
    SweepConfig neel = s;
    neel.base.initial_state = InitialState::parse("neel");
    neel.n_e_values = {3};
    neel.seeds_per_point = 1;
    const SweepResult rn = run_size_sweep(neel);
    CHECK(std::isnan(rn.rows[0].max_offdiag_rel));
    CHECK(std::isnan(rn.aggregates[0].max_offdiag_rel));
    std::ostringstream on;
    write_sweep(on, neel, rn);
    CHECK(on.str().find(",,") != std::string::npos);

    CHECK_THROWS_AS(parse_sweep_config("n_e_values = 4\nk_constraint = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_config("n_e_values = 4\nk_constraint = 1\nn_e = 4\nwindow_t_inf = 1\n"
                                       "window_delta_t = 1\n"),
                    ConfigError);
}

TEST_CASE("log2 slope of synthetic aggregates") {
    SweepResult r;
    for (int n : {8, 10, 12, 14}) {
        SweepAggregate a;
        a.n_e = n;
        a.count = 1;
        a.max_offdiag_rel = 100.0 * std::pow(2.0, -0.5 * n);
        r.aggregates.push_back(a);
    }
    CHECK(r.log2_slope() == doctest::Approx(-0.5));
}

TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (int n : {4, 6, 8, 10, 12, 14, 16})
        for (int j = 0; j < 10; ++j) seen.insert(derive_seed(1, n, j));
    CHECK(seen.size() == 70);
    CHECK(derive_seed(1, 8, 0) == derive_seed(1, 8, 0));
    CHECK(derive_seed(2, 8, 0) != derive_seed(1, 8, 0));
}

TEST_CASE("anisotropic runs") {
    ExperimentConfig c = parse_experiment_config(small_text);
    CHECK_THROWS_AS(run_appendix_b(c), ConfigError);
    c.model.anisotropy = {AnisotropyKind::TransverseField, 1.0};
    c.grid.t_max = 12;
    c.grid.window = AverageWindow{8, 4};
    const AppendixBResult r = run_appendix_b(c);
    CHECK(r.energy_0 == doctest::Approx(-1.0));
    CHECK(std::isfinite(r.delta_energy));
    CHECK(r.entropy_avg > 0.0);
    CHECK(r.series.has("cs_energy"));
}

TEST_CASE("oracle suite") {
    const OracleReport ok = run_oracle_suite();
    for (const auto& c : ok.checks) CHECK_MESSAGE(c.passed, c.name);
    CHECK(ok.passed());
    OracleOptions bad;
    bad.flip_interaction_sign = true;
    CHECK_FALSE(run_oracle_suite(bad).passed());
}

TEST_CASE("shipped config files load") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SPINBATH_CONFIG_DIR)) {
        if (entry.path().extension() != ".conf") continue;
        std::ifstream in(entry.path());
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        INFO(entry.path().string());
        if (text.find("n_e_values") != std::string::npos) CHECK_NOTHROW(load_sweep_config(entry.path()));
        else CHECK_NOTHROW(load_experiment_config(entry.path()).validate());
        ++seen;
    }
    CHECK(seen >= 5);
}
