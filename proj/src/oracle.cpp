#include "spinbath/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "spinbath/csbasis.hpp"
#include "spinbath/model.hpp"
#include "spinbath/observables.hpp"
#include "spinbath/propagator.hpp"

namespace spinbath {

namespace {

// exp(-iHt) psi via full diagonalization.
StateVector dense_evolve(const Eigen::MatrixXcd& h, const StateVector& psi, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx{0.0, -es.eigenvalues()(k) * t});
    const Eigen::VectorXcd out = es.eigenvectors() * c;
    return StateVector(psi.n_sites(), std::vector<cplx>(out.data(), out.data() + out.size()));
}

StateVector random_state(int n, Rng& rng) {
    StateVector psi(n);
    for (std::size_t x = 0; x < psi.size(); ++x) psi[x] = rng.gaussian_complex();
    psi.normalize();
    return psi;
}

struct Instance {
    Model model;
    TermList fast_terms;  // what the fast path propagates (possibly mutated)
};

Instance make_instance(const ModelConfig& cfg, bool mutate) {
    Instance in{build_model(cfg), {}};
    TermList interaction = in.model.interaction;
    if (mutate) {
        for (auto& term : interaction) term.strength = -term.strength;
    }
    in.fast_terms = in.model.cs;
    in.fast_terms.insert(in.fast_terms.end(), in.model.anisotropy.begin(), in.model.anisotropy.end());
    in.fast_terms.insert(in.fast_terms.end(), interaction.begin(), interaction.end());
    in.fast_terms.insert(in.fast_terms.end(), in.model.environment.begin(), in.model.environment.end());
    return in;
}

Propagator fast_propagator(const TermList& terms, int n_sites, int n_s, const std::vector<std::uint32_t>& patterns = {}) {
    CompiledHamiltonian ham = patterns.empty() ? CompiledHamiltonian(terms, n_sites, n_s)
                                               : CompiledHamiltonian(terms, n_sites, n_s, patterns);
    const SpectralWindow w = lanczos_window(ham);
    return Propagator(std::move(ham), w);
}

OracleCheck check(std::string name, double deviation, double tolerance) {
    return {std::move(name), deviation, tolerance, deviation <= tolerance};
}

OracleCheck dense_exponential(const OracleOptions& o, AnisotropyKind kind, const char* name) {
    ModelConfig cfg;
    cfg.n_e = 4;
    cfg.i_strength = 2.0;
    cfg.k_strength = 1.0;
    cfg.anisotropy = {kind, 0.7};
    cfg.seed = o.seed;
    const Instance in = make_instance(cfg, o.flip_interaction_sign);
    Rng rng(o.seed ^ 0xdeadbeefULL);
    const StateVector psi0 = random_state(cfg.n_sites(), rng);
    const Eigen::MatrixXcd h = dense_matrix(in.model.full(), cfg.n_sites());
    Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s);
    double dev = 0.0;
    StateVector psi = psi0;
    double t = 0.0;
    for (double tk : {0.3, 2.0, 7.5}) {
        prop.advance(psi, tk - t);
        t = tk;
        dev = std::max(dev, max_abs_difference(psi, dense_evolve(h, psi0, tk)));
    }
    return check(name, dev, 1e-10);
}

OracleCheck dense_exponential_sector(const OracleOptions& o) {
    ModelConfig cfg;
    cfg.n_e = 4;
    cfg.i_strength = 20.0;
    cfg.k_strength = 0.5;
    cfg.seed = o.seed;
    const Instance in = make_instance(cfg, o.flip_interaction_sign);
    const StateVector cs = initial_cs_state({InitialStateKind::Neel, {}}, cfg.n_s, in.model.cs);
    const StateVector psi0 = product_state(cs, in.model.env_state);
    const Eigen::MatrixXcd h = dense_matrix(in.model.full(), cfg.n_sites());
    Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s, patterns_with_up_count(cfg.n_s, 2));
    double dev = 0.0;
    StateVector psi = psi0;
    double t = 0.0;
    for (double tk : {0.05, 1.0, 10.0}) {
        prop.advance(psi, tk - t);
        t = tk;
        dev = std::max(dev, max_abs_difference(psi, dense_evolve(h, psi0, tk)));
    }
    return check("dense_exponential_sector", dev, 1e-10);
}

OracleCheck branch_overlap(const OracleOptions& o) {
    ModelConfig cfg;
    cfg.n_e = 6;
    cfg.i_strength = 20.0;
    cfg.k_strength = 1.0;
    cfg.seed = o.seed;
    const Instance in = make_instance(cfg, o.flip_interaction_sign);
    const StateVector cs = initial_cs_state({InitialStateKind::Chi, {}}, cfg.n_s, in.model.cs);
    const cplx alpha = cs[15], beta = cs[0];
    std::vector<std::uint32_t> patterns{0, 15};
    Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s, patterns);
    double dev = 0.0;
    StateVector psi = product_state(cs, in.model.env_state);
    double t = 0.0;
    for (double tk : {0.1, 1.0, 10.0}) {
        prop.advance(psi, tk - t);
        t = tk;
        const ReducedDensityMatrix rho = reduced_density_matrix(psi, cfg.n_s, cfg.n_e);
        const cplx overlap = branch_overlap_oracle(in.model.env_state, in.model.realization, in.model.environment, tk,
                                                   default_epsilon);
        dev = std::max(dev, std::abs(rho(15, 0) - alpha * std::conj(beta) * std::conj(overlap)));
    }
    return check("branch_overlap", dev, 1e-9);
}

OracleCheck partial_trace_loop(const OracleOptions& o) {
    const int n_s = 4, n_e = 5;
    Rng rng(o.seed ^ 0x7ace);
    const StateVector psi = random_state(n_s + n_e, rng);
    const ReducedDensityMatrix rho = reduced_density_matrix(psi, n_s, n_e);
    double dev = 0.0;
    for (std::size_t s = 0; s < 16; ++s) {
        for (std::size_t s2 = 0; s2 < 16; ++s2) {
            cplx sum{0.0, 0.0};
            for (std::size_t e = 0; e < (std::size_t{1} << n_e); ++e) {
                sum += psi[(e << n_s) | s] * std::conj(psi[(e << n_s) | s2]);
            }
            dev = std::max(dev, std::abs(sum - rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2))));
        }
    }
    return check("partial_trace_loop", dev, 1e-12);
}

// Norm, Hermiticity, trace and positivity along an S^z-breaking trajectory;
// sector confinement and entropy basis invariance along a conserving one.
std::vector<OracleCheck> trajectory_checks(const OracleOptions& o) {
    std::vector<OracleCheck> out;
    const std::vector<double> grid{0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0};
    {
        ModelConfig cfg;
        cfg.n_e = 6;
        cfg.i_strength = 20.0;
        cfg.k_strength = 1.0;
        cfg.anisotropy = {AnisotropyKind::TransverseField, 1.0};
        cfg.seed = o.seed;
        const Instance in = make_instance(cfg, o.flip_interaction_sign);
        Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s);
        const StateVector cs = initial_cs_state({InitialStateKind::Chi, {}}, cfg.n_s, in.model.cs);
        double dev = 0.0;
        for_each_checkpoint(prop, product_state(cs, in.model.env_state), grid,
                            [&](std::size_t, double, const StateVector& psi) {
                                const ReducedDensityMatrix rho = reduced_density_matrix(psi, cfg.n_s, cfg.n_e);
                                const auto& m = rho.entries();
                                dev = std::max(dev, std::abs(psi.norm() - 1.0));
                                dev = std::max(dev, (m - m.adjoint()).cwiseAbs().maxCoeff());
                                dev = std::max(dev, std::abs(m.trace() - cplx{1.0, 0.0}));
                                dev = std::max(dev, std::max(0.0, -rho.eigenvalues().minCoeff()));
                            });
        out.push_back(check("checkpoint_integrity", dev, 1e-10));
    }
    {
        ModelConfig cfg;
        cfg.n_e = 6;
        cfg.i_strength = 20.0;
        cfg.k_strength = 1.0;
        cfg.seed = o.seed;
        const Instance in = make_instance(cfg, o.flip_interaction_sign);
        Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s);
        const StateVector cs = initial_cs_state({InitialStateKind::Neel, {}}, cfg.n_s, in.model.cs);
        const CsEigenbasis basis = build_eigenbasis(in.model.cs, cfg.n_s);
        double confinement = 0.0, invariance = 0.0;
        for_each_checkpoint(prop, product_state(cs, in.model.env_state), grid,
                            [&](std::size_t, double, const StateVector& psi) {
                                const ReducedDensityMatrix rho = reduced_density_matrix(psi, cfg.n_s, cfg.n_e);
                                double sector = 0.0;
                                for (std::uint32_t x : patterns_with_up_count(cfg.n_s, 2)) sector += rho(x, x).real();
                                confinement = std::max(confinement, std::abs(sector - 1.0));
                                invariance = std::max(invariance, std::abs(von_neumann_entropy(rho) -
                                                                           von_neumann_entropy(transform_rdm(rho, basis))));
                            });
        out.push_back(check("sector_confinement", confinement, 1e-9));
        out.push_back(check("entropy_basis_invariance", invariance, 1e-10));
    }
    return out;
}

OracleCheck eigenbasis_reconstruction() {
    const int n_s = 4;
    const TermList h = build_cs(n_s, 1.0);
    const CsEigenbasis basis = build_eigenbasis(h, n_s);
    Eigen::VectorXcd e(basis.labels.size());
    for (std::size_t k = 0; k < basis.labels.size(); ++k) e(static_cast<Eigen::Index>(k)) = basis.labels[k].energy;
    const Eigen::MatrixXcd& v = basis.vectors;
    double dev = (v * e.asDiagonal() * v.adjoint() - dense_matrix(h, n_s)).cwiseAbs().maxCoeff();
    dev = std::max(dev, (v.adjoint() * v - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff());
    return check("eigenbasis_reconstruction", dev, 1e-10);
}

OracleCheck pointer_state(const OracleOptions& o) {
    ModelConfig cfg;
    cfg.n_e = 6;
    cfg.i_strength = 20.0;
    cfg.k_strength = 1.0;
    cfg.seed = o.seed;
    const Instance in = make_instance(cfg, o.flip_interaction_sign);
    Propagator prop = fast_propagator(in.fast_terms, cfg.n_sites(), cfg.n_s, {15});
    const StateVector cs = initial_cs_state({InitialStateKind::Up, {}}, cfg.n_s, in.model.cs);
    StateVector psi = product_state(cs, in.model.env_state);
    const ReducedDensityMatrix rho0 = reduced_density_matrix(psi, cfg.n_s, cfg.n_e);
    prop.advance(psi, 10.0);
    const ReducedDensityMatrix rho = reduced_density_matrix(psi, cfg.n_s, cfg.n_e);
    const double dev = std::max(von_neumann_entropy(rho), (rho.entries() - rho0.entries()).cwiseAbs().maxCoeff());
    return check("pointer_state_stationarity", dev, 1e-9);
}

// Runs one check, turning a thrown error into a failed entry.
template <class F>
void run(std::vector<OracleCheck>& out, const std::string& name, F&& f) {
    try {
        f();
    } catch (const std::exception&) {
        out.push_back({name + " (threw)", INFINITY, 0.0, false});
    }
}

}  // namespace

bool OracleReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

OracleReport run_oracle_suite(const OracleOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    OracleReport r;
    auto& c = r.checks;
    run(c, "dense_exponential_field", [&] {
        c.push_back(dense_exponential(options, AnisotropyKind::TransverseField, "dense_exponential_field"));
    });
    run(c, "dense_exponential_dipolar", [&] {
        c.push_back(dense_exponential(options, AnisotropyKind::Dipolar, "dense_exponential_dipolar"));
    });
    run(c, "dense_exponential_sector", [&] { c.push_back(dense_exponential_sector(options)); });
    run(c, "branch_overlap", [&] { c.push_back(branch_overlap(options)); });
    run(c, "partial_trace_loop", [&] { c.push_back(partial_trace_loop(options)); });
    run(c, "trajectory", [&] {
        for (auto& x : trajectory_checks(options)) c.push_back(std::move(x));
    });
    run(c, "eigenbasis_reconstruction", [&] { c.push_back(eigenbasis_reconstruction()); });
    run(c, "pointer_state_stationarity", [&] { c.push_back(pointer_state(options)); });
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace spinbath
