#pragma once

// Reduced density matrix of the central system and the scalar diagnostics
// derived from it.

#include <span>

#include <Eigen/Dense>

#include "spinbath/model.hpp"
#include "spinbath/spin_core.hpp"

namespace spinbath {

enum class BasisTag { Computational, CsEigen };

const char* to_string(BasisTag tag);

// Eigenvalues in (-negative_tolerance, 0) are roundoff; anything more
// negative is a bug.
inline constexpr double negative_tolerance = 1e-10;

class ReducedDensityMatrix {
public:
    explicit ReducedDensityMatrix(Eigen::MatrixXcd entries, BasisTag basis = BasisTag::Computational);

    const Eigen::MatrixXcd& entries() const { return rho_; }
    BasisTag basis() const { return basis_; }
    Eigen::Index dim() const { return rho_.rows(); }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return rho_(i, j); }

    // Ascending eigenvalues. Throws IntegrityError if not Hermitian to 1e-12.
    Eigen::VectorXd eigenvalues() const;

    // Hermiticity (1e-12), unit trace (1e-10), positivity (-1e-10).
    void check_integrity() const;

private:
    Eigen::MatrixXcd rho_;
    BasisTag basis_;
};

// rho[s, s'] = sum_e psi[(e << n_s) | s] conj(psi[(e << n_s) | s']).
ReducedDensityMatrix reduced_density_matrix(const StateVector& psi, int n_s, int n_e);

// Natural-log entropy -sum lambda ln lambda.
double von_neumann_entropy(const ReducedDensityMatrix& rho);

double max_off_diagonal(const ReducedDensityMatrix& rho);

struct OffDiagonalStats {
    double mean = 0.0;
    double stddev = 0.0;
};
OffDiagonalStats off_diagonal_stats(const ReducedDensityMatrix& rho);

// 0.5 * sum |mu_i| over eigenvalues of rho1 - rho2.
double trace_distance(const ReducedDensityMatrix& rho1, const ReducedDensityMatrix& rho2);

// Entropy of the diagonal of rho0: the state left by ideal dephasing in rho0's basis.
double dephasing_entropy(const ReducedDensityMatrix& rho0);

// Tr(rho H) for a dense CS Hamiltonian in the computational basis.
double cs_energy(const ReducedDensityMatrix& rho, const Eigen::MatrixXcd& cs_hamiltonian);

// (1/delta_t) * integral of the piecewise-linear interpolant of the samples
// over [t_inf, t_inf + delta_t]. Throws UsageError if the window is not
// inside the sampled range.
double time_average(std::span<const double> series, std::span<const double> times, double t_inf, double delta_t);

// <E_up(t)|E_down(t)> for the two environment branches
//   |E_up/down(t)> = exp[-it(H_E +/- sum_k alpha_k S^z_k)] |env0>,
// each propagated on the environment alone (plus one polarized ancilla spin
// that carries the +/- alpha_k fields). env_terms use full-register site
// indices (environment site k at n_s + k).
cplx branch_overlap_oracle(const StateVector& env0, const CouplingRealization& realization,
                           const TermList& env_terms, double t, double epsilon);

}  // namespace spinbath
