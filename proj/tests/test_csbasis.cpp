#include <doctest.h>

#include <cmath>
#include <map>

#include "spinbath/csbasis.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/model.hpp"
#include "test_util.hpp"

using namespace spinbath;

namespace {

const TermList& ring() {
    static const TermList r = build_cs(4, 1.0);
    return r;
}

}  // namespace

TEST_CASE("half-integer labels") {
    CHECK(HalfInteger::from_double(0.5).str() == "1/2");
    CHECK(HalfInteger::from_double(-1.5).str() == "-3/2");
    CHECK(HalfInteger::from_double(2.0).str() == "2");
    CHECK(HalfInteger::from_double(-1e-12).str() == "0");
    CHECK(CsLabel{HalfInteger{2}, HalfInteger{0}, -1.0}.ket() == "|1,0,-1>");
}

TEST_CASE("ring multiplets") {
    const CsEigenbasis b = build_eigenbasis(ring(), 4);
    REQUIRE(b.labels.size() == 16);
    std::map<std::pair<int, long>, int> count;  // (2S, E) -> states
    for (const auto& l : b.labels) ++count[{l.s_tot.twice, std::lround(l.energy)}];
    CHECK(count[{0, -2}] == 1);
    CHECK(count[{0, 0}] == 1);
    CHECK(count[{2, -1}] == 3);
    CHECK(count[{2, 0}] == 6);
    CHECK(count[{4, 1}] == 5);
    CHECK(count.size() == 5);

    for (std::size_t k = 1; k < b.labels.size(); ++k) {
        const auto& a = b.labels[k - 1];
        const auto& c = b.labels[k];
        const bool ordered = a.sz < c.sz || (a.sz == c.sz && (a.energy < c.energy - degeneracy_threshold ||
                                                              (std::abs(a.energy - c.energy) <= degeneracy_threshold &&
                                                               a.s_tot <= c.s_tot)));
        CHECK(ordered);
    }
}

TEST_CASE("simultaneous eigenvectors") {
    const CsEigenbasis b = build_eigenbasis(ring(), 4);
    const Eigen::MatrixXcd h = testutil::kron_hamiltonian(ring(), 4);
    const Eigen::MatrixXcd s2 = total_spin_squared(4), sz = total_sz(4);
    for (Eigen::Index k = 0; k < 16; ++k) {
        const Eigen::VectorXcd v = b.vectors.col(k);
        const CsLabel& l = b.labels[static_cast<std::size_t>(k)];
        const double s = l.s_tot.value();
        CHECK((h * v - l.energy * v).norm() < 1e-10);
        CHECK((s2 * v - s * (s + 1) * v).norm() < 1e-10);
        CHECK((sz * v - l.sz.value() * v).norm() < 1e-10);
    }
    CHECK((b.vectors.adjoint() * b.vectors - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("total spin operators") {
    const Eigen::MatrixXcd s2 = total_spin_squared(2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s2);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(2.0));
    CHECK(total_sz(3)(7, 7).real() == doctest::Approx(1.5));
}

TEST_CASE("reconstruction from the eigenbasis") {
    const CsEigenbasis b = build_eigenbasis(ring(), 4);
    const ReducedDensityMatrix rho = reduced_density_matrix(testutil::random_state(10, 3), 4, 6);
    const ReducedDensityMatrix r = transform_rdm(rho, b);
    CHECK(r.basis() == BasisTag::CsEigen);
    CHECK((b.vectors * r.entries() * b.vectors.adjoint() - rho.entries()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(von_neumann_entropy(r) - von_neumann_entropy(rho)) < 1e-10);
}

TEST_CASE("eigenbasis is bitwise deterministic") {
    const CsEigenbasis a = build_eigenbasis(ring(), 4), b = build_eigenbasis(ring(), 4);
    CHECK(a.vectors == b.vectors);
    // first nonzero coordinate of every column is real positive
    for (Eigen::Index k = 0; k < 16; ++k) {
        Eigen::Index first = 0;
        while (std::abs(a.vectors(first, k)) < 1e-12) ++first;
        CHECK(a.vectors(first, k).real() > 0.0);
        CHECK(std::abs(a.vectors(first, k).imag()) < 1e-14);
    }
}

TEST_CASE("ground and Neel in the eigenbasis") {
    const CsEigenbasis b = build_eigenbasis(ring(), 4);
    const auto in_basis = [&](InitialStateKind k) {
        return transform_rdm(reduced_density_matrix(initial_cs_state({k, {}}, 4, ring()), 4, 0), b);
    };
    const ReducedDensityMatrix g = in_basis(InitialStateKind::Ground);
    Eigen::Index idx = -1;
    for (std::size_t k = 0; k < 16; ++k)
        if (b.labels[k].energy < -1.5) idx = static_cast<Eigen::Index>(k);
    REQUIRE(idx >= 0);
    CHECK(std::abs(g(idx, idx) - 1.0) < 1e-12);
    CHECK(max_off_diagonal(g) < 1e-12);

    // the Neel state has weight 1/3 on the singlet ground state
    const ReducedDensityMatrix n = in_basis(InitialStateKind::Neel);
    CHECK(std::abs(n(idx, idx) - 1.0 / 3.0) < 1e-12);
    CHECK(max_off_diagonal(n) > 0.1);
}

TEST_CASE("anisotropic ring has no simultaneous eigenbasis") {
    TermList t = ring();
    t.push_back(HamiltonianTerm::field_x(0, 1.0));
    CHECK_THROWS_AS(build_eigenbasis(t, 4), ConfigError);
    TermList d = ring();
    d.push_back(HamiltonianTerm::xx_bond(0, 1, 1.0));
    CHECK_THROWS_AS(build_eigenbasis(d, 4), ConfigError);
}

TEST_CASE("sector max entropy") {
    CHECK(sector_max_entropy(4, HalfInteger{0}) == doctest::Approx(std::log(6.0)));
    CHECK(sector_max_entropy(4, HalfInteger{4}) == doctest::Approx(0.0));
    CHECK(sector_max_entropy(3, HalfInteger{1}) == doctest::Approx(std::log(3.0)));
    CHECK_THROWS_AS((void)sector_max_entropy(4, HalfInteger{1}), ConfigError);
    CHECK_THROWS_AS((void)sector_max_entropy(4, HalfInteger{6}), ConfigError);
}

TEST_CASE("rotations inside a degenerate level") {
    // Entropy and level-summed populations do not depend on the gauge choice
    // inside a degenerate subspace.
    const CsEigenbasis b = build_eigenbasis(ring(), 4);
    std::vector<Eigen::Index> level;
    for (std::size_t k = 0; k < 16; ++k)
        if (b.labels[k].sz.twice == 0 && b.labels[k].s_tot.twice == 2 && std::abs(b.labels[k].energy) < 1e-9)
            level.push_back(static_cast<Eigen::Index>(k));
    REQUIRE(level.size() == 2);

    CsEigenbasis rotated = b;
    const double th = 0.7;
    const cplx ph = std::exp(cplx(0, 0.3));
    const Eigen::VectorXcd u = b.vectors.col(level[0]), v = b.vectors.col(level[1]);
    rotated.vectors.col(level[0]) = std::cos(th) * u + ph * std::sin(th) * v;
    rotated.vectors.col(level[1]) = -std::conj(ph) * std::sin(th) * u + std::cos(th) * v;

    const ReducedDensityMatrix rho = reduced_density_matrix(testutil::random_state(9, 5), 4, 5);
    const ReducedDensityMatrix a = transform_rdm(rho, b), c = transform_rdm(rho, rotated);
    CHECK(std::abs(von_neumann_entropy(a) - von_neumann_entropy(c)) < 1e-10);
    const double pa = (a(level[0], level[0]) + a(level[1], level[1])).real();
    const double pc = (c(level[0], level[0]) + c(level[1], level[1])).real();
    CHECK(std::abs(pa - pc) < 1e-12);
}
