#include <doctest.h>

#include <cmath>

#include "spinbath/errors.hpp"
#include "spinbath/model.hpp"
#include "spinbath/observables.hpp"
#include "spinbath/propagator.hpp"
#include "test_util.hpp"

using namespace spinbath;
using testutil::random_state;

namespace {

ReducedDensityMatrix diag_rho(std::initializer_list<double> p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
    Eigen::Index k = 0;
    for (double x : p) v(k++) = x;
    return ReducedDensityMatrix(v.cast<cplx>().asDiagonal().toDenseMatrix());
}

// Partial trace by an explicit double loop over (s, s', e).
Eigen::MatrixXcd loop_rdm(const StateVector& psi, int n_s, int n_e) {
    const std::size_t ds = std::size_t{1} << n_s, de = std::size_t{1} << n_e;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(ds));
    for (std::size_t s = 0; s < ds; ++s)
        for (std::size_t sp = 0; sp < ds; ++sp)
            for (std::size_t e = 0; e < de; ++e)
                rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(sp)) +=
                    psi[e * ds + s] * std::conj(psi[e * ds + sp]);
    return rho;
}

}  // namespace

TEST_CASE("reduced density matrix of simple states") {
    // |up,down> (x) |phi>: CS pure on index 0b01
    StateVector cs = StateVector::basis_state(2, 0b01);
    const ReducedDensityMatrix r = reduced_density_matrix(product_state(cs, random_state(3, 1)), 2, 3);
    CHECK(std::abs(r(1, 1) - 1.0) < 1e-14);
    CHECK(r.entries().cwiseAbs().sum() == doctest::Approx(1.0));

    // Bell pair between CS site and one environment site
    StateVector bell(2);
    bell[0b00] = bell[0b11] = 1 / std::sqrt(2.0);
    const ReducedDensityMatrix half = reduced_density_matrix(bell, 1, 1);
    CHECK((half.entries() - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(von_neumann_entropy(half) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("partial trace against an explicit loop") {
    const StateVector psi = random_state(16, 12);
    const ReducedDensityMatrix rho = reduced_density_matrix(psi, 4, 12);
    CHECK((rho.entries() - loop_rdm(psi, 4, 12)).cwiseAbs().maxCoeff() < 1e-12);
    rho.check_integrity();
    const double purity = (rho.entries() * rho.entries()).trace().real();
    CHECK(purity >= 1.0 / 16 - 1e-12);
    CHECK(purity <= 1.0 + 1e-12);
}

TEST_CASE("entropy") {
    CHECK(von_neumann_entropy(diag_rho({1, 0, 0, 0})) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(diag_rho({0.25, 0.25, 0.25, 0.25})) == doctest::Approx(std::log(4.0)));
    CHECK(von_neumann_entropy(diag_rho({0.1, 0.9})) == doctest::Approx(testutil::binary_entropy(0.1)));
    CHECK(von_neumann_entropy(diag_rho({0.1, 0.9})) == doctest::Approx(0.3251).epsilon(1e-3));

    // slightly negative eigenvalues from roundoff are ignored
    CHECK(von_neumann_entropy(diag_rho({1.0 + 1e-13, -1e-13})) == doctest::Approx(0.0));

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    bad(0, 1) = 0.3;
    CHECK_THROWS_AS((void)von_neumann_entropy(ReducedDensityMatrix(bad)), IntegrityError);

    // invariant under unitary conjugation
    const ReducedDensityMatrix rho = reduced_density_matrix(random_state(8, 2), 4, 4);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd::Random(16, 16));
    const Eigen::MatrixXcd u = qr.householderQ();
    const ReducedDensityMatrix rotated(u * rho.entries() * u.adjoint());
    CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-10);
}

TEST_CASE("integrity checks") {
    CHECK_THROWS_AS(diag_rho({0.5, 0.6}).check_integrity(), IntegrityError);
    CHECK_THROWS_AS(diag_rho({1.1, -0.1}).check_integrity(), IntegrityError);
    diag_rho({0.5, 0.5}).check_integrity();
}

TEST_CASE("max off-diagonal") {
    CHECK(max_off_diagonal(diag_rho({0.3, 0.7})) == 0.0);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Constant(2, 2, 0.5);
    CHECK(max_off_diagonal(ReducedDensityMatrix(m)) == doctest::Approx(0.5));
    m(0, 1) = cplx(0, 0.2);
    m(1, 0) = cplx(0, -0.2);
    CHECK(max_off_diagonal(ReducedDensityMatrix(m)) == doctest::Approx(0.2));

    const OffDiagonalStats s = off_diagonal_stats(ReducedDensityMatrix(m));
    CHECK(s.mean == doctest::Approx(0.2));
    CHECK(s.stddev == doctest::Approx(0.0));
}

TEST_CASE("trace distance") {
    CHECK(trace_distance(diag_rho({1, 0}), diag_rho({0, 1})) == doctest::Approx(1.0));
    CHECK(trace_distance(diag_rho({0.5, 0.5}), diag_rho({0.5, 0.5})) == doctest::Approx(0.0));

    Eigen::Matrix2cd plus = Eigen::Matrix2cd::Constant(0.5);
    CHECK(trace_distance(ReducedDensityMatrix(plus), diag_rho({1, 0})) == doctest::Approx(1 / std::sqrt(2.0)));

    const auto a = reduced_density_matrix(random_state(7, 1), 3, 4);
    const auto b = reduced_density_matrix(random_state(7, 2), 3, 4);
    const auto c = reduced_density_matrix(random_state(7, 3), 3, 4);
    CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12);
    CHECK(trace_distance(a, b) <= 1.0 + 1e-12);
    CHECK_THROWS_AS((void)trace_distance(a, diag_rho({1, 0})), UsageError);
}

TEST_CASE("dephasing entropy") {
    const TermList ring = build_cs(4, 1.0);
    const StateVector chi = initial_cs_state({InitialStateKind::Chi, {}}, 4, ring);
    const ReducedDensityMatrix rho = reduced_density_matrix(chi, 4, 0);
    CHECK(dephasing_entropy(rho) == doctest::Approx(testutil::binary_entropy(0.1)));
    CHECK(dephasing_entropy(diag_rho({0.25, 0.75})) == doctest::Approx(von_neumann_entropy(diag_rho({0.25, 0.75}))));
}

TEST_CASE("cs energy") {
    const TermList ring = build_cs(4, 1.0);
    const Eigen::MatrixXcd h = dense_matrix(ring, 4);
    const auto energy = [&](InitialStateKind k) {
        return cs_energy(reduced_density_matrix(initial_cs_state({k, {}}, 4, ring), 4, 0), h);
    };
    CHECK(energy(InitialStateKind::Neel) == doctest::Approx(-1.0));
    CHECK(energy(InitialStateKind::Ground) == doctest::Approx(-2.0));
    CHECK(energy(InitialStateKind::Up) == doctest::Approx(1.0));
    CHECK(energy(InitialStateKind::Chi) == doctest::Approx(1.0));
    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(16, 16) / 16.0;
    CHECK(cs_energy(ReducedDensityMatrix(mixed), h) == doctest::Approx(0.0));
}

TEST_CASE("time average") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    const std::vector<double> flat{2, 2, 2, 2, 2};
    CHECK(time_average(flat, t, 1.0, 2.0) == doctest::Approx(2.0));
    const std::vector<double> ramp{0, 1, 2, 3, 4};
    CHECK(time_average(ramp, t, 1.0, 2.0) == doctest::Approx(2.0));
    CHECK(time_average(ramp, t, 0.5, 1.0) == doctest::Approx(1.0));
    CHECK(time_average(ramp, t, 0.0, 4.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)time_average(ramp, t, 3.0, 2.0), UsageError);
    CHECK_THROWS_AS((void)time_average(ramp, t, -1.0, 2.0), UsageError);
}

TEST_CASE("branch overlap") {
    ModelConfig cfg;
    cfg.n_e = 6;
    cfg.i_strength = 20.0;
    cfg.k_strength = 1.0;
    const Model m = build_model(cfg);
    CHECK(std::abs(branch_overlap_oracle(m.env_state, m.realization, m.environment, 0.0, 1e-12) - 1.0) < 1e-12);

    // direct cross-check against two full-register evolutions
    const double t = 1.3;
    TermList terms = m.full();
    const StateVector up = evolve(product_state(StateVector::basis_state(4, 15), m.env_state), terms, t);
    const StateVector down = evolve(product_state(StateVector::basis_state(4, 0), m.env_state), terms, t);
    cplx direct = 0.0;
    for (std::size_t e = 0; e < 64; ++e) direct += std::conj(up[(e << 4) | 15]) * down[e << 4];
    // the ring energy phase is +1 on both branches
    CHECK(std::abs(branch_overlap_oracle(m.env_state, m.realization, m.environment, t, 1e-12) - direct) < 1e-10);
}

TEST_CASE("two-branch entropy bound") {
    // chi = a|up> + b|down>: the CS stays in span{up, down}, so S <= H2(|b|^2)
    ModelConfig cfg;
    cfg.n_e = 8;
    cfg.i_strength = 20.0;
    cfg.k_strength = 1.0;
    const Model m = build_model(cfg);
    const StateVector psi0 = product_state(initial_cs_state({InitialStateKind::Chi, {}}, 4, m.cs), m.env_state);
    const std::vector<double> grid{0.0, 0.3, 1.0, 4.0, 10.0};
    for (const auto& psi : sample_trajectory(psi0, m.full(), grid)) {
        const auto rho = reduced_density_matrix(psi, 4, 8);
        CHECK(von_neumann_entropy(rho) <= testutil::binary_entropy(0.1) + 1e-10);
        CHECK(std::abs(rho(0, 0) - 0.9) < 1e-10);
        CHECK(std::abs(rho(15, 15) - 0.1) < 1e-10);
    }
}
