#include "spinbath/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinbath/errors.hpp"
#include "spinbath/propagator.hpp"

namespace spinbath {

const char* to_string(BasisTag tag) {
    return tag == BasisTag::Computational ? "computational" : "cs_eigen";
}

ReducedDensityMatrix::ReducedDensityMatrix(Eigen::MatrixXcd entries, BasisTag basis)
    : rho_(std::move(entries)), basis_(basis) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw UsageError("density matrix must be square and nonempty");
}

Eigen::VectorXd ReducedDensityMatrix::eigenvalues() const {
    const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        throw IntegrityError("density matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

void ReducedDensityMatrix::check_integrity() const {
    const Eigen::VectorXd ev = eigenvalues();
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10 || std::abs(rho_.trace().imag()) > 1e-10) {
        throw IntegrityError("density matrix trace is " + std::to_string(tr));
    }
    if (ev.minCoeff() < -negative_tolerance) {
        throw IntegrityError("density matrix has eigenvalue " + std::to_string(ev.minCoeff()));
    }
}

ReducedDensityMatrix reduced_density_matrix(const StateVector& psi, int n_s, int n_e) {
    if (n_s < 0 || n_e < 0 || psi.n_sites() != n_s + n_e) {
        throw UsageError("reduced_density_matrix: state has " + std::to_string(psi.n_sites()) + " sites, expected " +
                         std::to_string(n_s + n_e));
    }
    using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Index rows = Eigen::Index{1} << n_e;
    const Eigen::Index cols = Eigen::Index{1} << n_s;
    const Eigen::Map<const RowMajor> m(psi.data(), rows, cols);  // m(e, s) = psi[(e << n_s) | s]
    Eigen::MatrixXcd rho = m.transpose() * m.conjugate();
    return ReducedDensityMatrix(std::move(rho));
}

namespace {

double entropy_of(const Eigen::VectorXd& probabilities) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities(i);
        if (p < -negative_tolerance) throw IntegrityError("negative probability " + std::to_string(p));
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

}  // namespace

double von_neumann_entropy(const ReducedDensityMatrix& rho) { return entropy_of(rho.eigenvalues()); }

double max_off_diagonal(const ReducedDensityMatrix& rho) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        for (Eigen::Index j = 0; j < rho.dim(); ++j) {
            if (i != j) m = std::max(m, std::abs(rho(i, j)));
        }
    }
    return m;
}

OffDiagonalStats off_diagonal_stats(const ReducedDensityMatrix& rho) {
    const Eigen::Index n = rho.dim();
    if (n < 2) return {};
    double sum = 0.0, sum_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double a = std::abs(rho(i, j));
            sum += a;
            sum_sq += a * a;
        }
    }
    const double count = static_cast<double>(n * (n - 1));
    const double mean = sum / count;
    return {mean, std::sqrt(std::max(0.0, sum_sq / count - mean * mean))};
}

double trace_distance(const ReducedDensityMatrix& rho1, const ReducedDensityMatrix& rho2) {
    if (rho1.basis() != rho2.basis()) throw UsageError("trace_distance: density matrices are in different bases");
    if (rho1.dim() != rho2.dim()) throw UsageError("trace_distance: dimension mismatch");
    const ReducedDensityMatrix diff(rho1.entries() - rho2.entries(), rho1.basis());
    return 0.5 * diff.eigenvalues().cwiseAbs().sum();
}

double dephasing_entropy(const ReducedDensityMatrix& rho0) {
    return entropy_of(rho0.entries().diagonal().real());
}

double cs_energy(const ReducedDensityMatrix& rho, const Eigen::MatrixXcd& cs_hamiltonian) {
    if (rho.basis() != BasisTag::Computational) throw UsageError("cs_energy: expects a computational-basis RDM");
    if (cs_hamiltonian.rows() != rho.dim() || cs_hamiltonian.cols() != rho.dim()) {
        throw UsageError("cs_energy: Hamiltonian dimension mismatch");
    }
    const cplx e = (rho.entries() * cs_hamiltonian).trace();
    if (std::abs(e.imag()) > 1e-10) throw IntegrityError("Tr(rho H) has imaginary part " + std::to_string(e.imag()));
    return e.real();
}

double time_average(std::span<const double> series, std::span<const double> times, double t_inf, double delta_t) {
    if (series.size() != times.size() || times.size() < 2) throw UsageError("time_average: need >= 2 matching samples");
    if (!(delta_t > 0.0)) throw UsageError("time_average: window length must be positive");
    const double t_end = t_inf + delta_t;
    const double tol = 1e-9 * std::max(1.0, std::abs(t_end));
    if (t_inf < times.front() - tol || t_end > times.back() + tol) {
        throw UsageError("time_average: window [" + std::to_string(t_inf) + ", " + std::to_string(t_end) +
                         "] outside the sampled range");
    }
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double a = std::max(times[k], t_inf);
        const double b = std::min(times[k + 1], t_end);
        if (b <= a) continue;
        const double span = times[k + 1] - times[k];
        auto at = [&](double t) { return series[k] + (series[k + 1] - series[k]) * (t - times[k]) / span; };
        integral += 0.5 * (at(a) + at(b)) * (b - a);
    }
    return integral / delta_t;
}

cplx branch_overlap_oracle(const StateVector& env0, const CouplingRealization& realization,
                           const TermList& env_terms, double t, double epsilon) {
    const int n_s = static_cast<int>(realization.i_matrix.rows());
    const int n_e = env0.n_sites();
    if (realization.alpha.size() != n_e) throw UsageError("branch_overlap_oracle: realization/environment size mismatch");

    // Site 0 is the ancilla, environment site k moves to k + 1.
    TermList terms;
    for (const auto& term : env_terms) {
        HamiltonianTerm shifted = term;
        shifted.i = term.i - n_s + 1;
        shifted.j = term.j - n_s + 1;
        terms.push_back(shifted);
    }
    // 2 alpha_k S^z_anc S^z_k = +/- alpha_k S^z_k for the ancilla up/down.
    for (int k = 0; k < n_e; ++k) terms.push_back(HamiltonianTerm::ising_zz(0, k + 1, 2.0 * realization.alpha(k)));

    StateVector up(n_e + 1), down(n_e + 1);
    for (std::size_t e = 0; e < env0.size(); ++e) {
        up[(e << 1) | 1] = env0[e];
        down[e << 1] = env0[e];
    }
    if (terms.empty()) return inner_product(env0, env0);
    const StateVector up_t = evolve(up, terms, t, epsilon);
    const StateVector down_t = evolve(down, terms, t, epsilon);
    cplx overlap{0.0, 0.0};
    for (std::size_t e = 0; e < env0.size(); ++e) overlap += std::conj(up_t[(e << 1) | 1]) * down_t[e << 1];
    return overlap;
}

}  // namespace spinbath
