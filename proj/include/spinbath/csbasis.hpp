#pragma once

// Energy eigenbasis of the central system with simultaneous S^2_tot and
// S^z_tot labels, and basis changes of reduced density matrices.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinbath/observables.hpp"
#include "spinbath/spin_core.hpp"

namespace spinbath {

// Integer or half-integer quantum number stored as twice its value.
struct HalfInteger {
    int twice = 0;

    static HalfInteger from_double(double v);  // rounds to the nearest half-integer
    double value() const { return 0.5 * twice; }
    std::string str() const;  // "1", "-1/2", ...

    friend auto operator<=>(const HalfInteger&, const HalfInteger&) = default;
};

struct CsLabel {
    HalfInteger s_tot;
    HalfInteger sz;
    double energy = 0.0;

    // Ket-style label, e.g. "|1,0,-1>".
    std::string ket() const;
};

struct CsEigenbasis {
    int n_s = 0;
    Eigen::MatrixXcd vectors;  // columns in computational coordinates
    std::vector<CsLabel> labels;
};

// Energies closer than this are one level.
inline constexpr double degeneracy_threshold = 1e-9;

// Dense S^2_tot and S^z_tot on n_s sites.
Eigen::MatrixXcd total_spin_squared(int n_s);
Eigen::MatrixXcd total_sz(int n_s);

// Sector by sector: diagonalize H within each S^z_tot block, split each
// energy level by S^2_tot, then canonicalize every (S^z, E, S) subspace by
// Gram-Schmidt on projected computational basis vectors in index order with
// the first nonzero coordinate made real positive. Columns are ordered by
// (sz, energy, s_tot). Throws ConfigError("no simultaneous eigenbasis") if H
// does not commute with S^z_tot and S^2_tot.
CsEigenbasis build_eigenbasis(const TermList& cs_terms, int n_s);

// V^dagger rho V.
ReducedDensityMatrix transform_rdm(const ReducedDensityMatrix& rho, const CsEigenbasis& basis);

// ln C(n_s, n_up) for the sector S^z_tot = sz. Throws ConfigError for a
// nonexistent sector.
double sector_max_entropy(int n_s, HalfInteger sz);

}  // namespace spinbath
