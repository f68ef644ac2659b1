#include "spinbath/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "spinbath/errors.hpp"

namespace spinbath {

cplx Rng::gaussian_complex() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // 1 - u1 in (0, 1]
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

void ModelConfig::validate() const {
    if (n_s < 2) throw ConfigError("n_s must be >= 2");
    if (n_e < 0) throw ConfigError("n_e must be >= 0");
    if (n_s + n_e > max_total_sites) {
        throw ConfigError("n_s + n_e = " + std::to_string(n_s + n_e) + " exceeds " +
                          std::to_string(max_total_sites));
    }
    for (double v : {j_s, i_strength, k_strength, anisotropy.strength}) {
        if (!std::isfinite(v) || v < 0) throw ConfigError("coupling strengths must be finite and >= 0");
    }
}

TermList build_cs(int n_s, double j_s) {
    if (n_s < 2) throw ConfigError("build_cs: n_s must be >= 2");
    TermList terms;
    if (n_s == 2) {
        terms.push_back(HamiltonianTerm::heisenberg(0, 1, j_s));
        return terms;
    }
    for (int i = 0; i < n_s; ++i) terms.push_back(HamiltonianTerm::heisenberg(i, (i + 1) % n_s, j_s));
    return terms;
}

TermList build_interaction(const ModelConfig& cfg, Rng& rng, CouplingRealization& realization) {
    cfg.validate();
    realization.i_matrix.setZero(cfg.n_s, cfg.n_e);
    realization.alpha.setZero(cfg.n_e);
    TermList terms;
    terms.reserve(static_cast<std::size_t>(cfg.n_s * cfg.n_e));
    for (int i = 0; i < cfg.n_s; ++i) {
        for (int k = 0; k < cfg.n_e; ++k) {
            const double s = cfg.i_strength * rng.uniform();
            realization.i_matrix(i, k) = s;
            terms.push_back(HamiltonianTerm::ising_zz(i, cfg.n_s + k, s));
        }
    }
    for (int k = 0; k < cfg.n_e; ++k) realization.alpha(k) = realization.i_matrix.col(k).sum() / 2.0;
    return terms;
}

TermList build_environment(const ModelConfig& cfg, Rng& rng, CouplingRealization& realization) {
    cfg.validate();
    realization.k_matrix.setZero(cfg.n_e, cfg.n_e);
    TermList terms;
    for (int k = 0; k < cfg.n_e; ++k) {
        for (int l = k + 1; l < cfg.n_e; ++l) {
            const double s = cfg.k_strength * rng.uniform();
            realization.k_matrix(k, l) = s;
            realization.k_matrix(l, k) = s;
            terms.push_back(HamiltonianTerm::heisenberg(cfg.n_s + k, cfg.n_s + l, s));
        }
    }
    return terms;
}

TermList build_anisotropy(const ModelConfig& cfg) {
    TermList terms;
    const double s = cfg.anisotropy.strength;
    switch (cfg.anisotropy.kind) {
    case AnisotropyKind::None: break;
    case AnisotropyKind::TransverseField:
        for (int i = 0; i < cfg.n_s; ++i) terms.push_back(HamiltonianTerm::field_x(i, s));
        break;
    case AnisotropyKind::Dipolar:
        for (const auto& bond : build_cs(cfg.n_s, 1.0)) terms.push_back(HamiltonianTerm::xx_bond(bond.i, bond.j, s));
        break;
    }
    return terms;
}

StateVector sample_environment_state(int n_e, Rng& rng) {
    StateVector phi(n_e);
    if (n_e == 0) {
        phi[0] = 1.0;
        return phi;
    }
    for (std::size_t n = 0; n < phi.size(); ++n) phi[n] = rng.gaussian_complex();
    phi.normalize();
    return phi;
}

InitialState InitialState::parse(const std::string& name) {
    if (name == "neel") return {InitialStateKind::Neel, {}};
    if (name == "ground") return {InitialStateKind::Ground, {}};
    if (name == "chi") return {InitialStateKind::Chi, {}};
    if (name == "up") return {InitialStateKind::Up, {}};
    if (name == "down") return {InitialStateKind::Down, {}};
    throw ConfigError("unknown initial state '" + name + "' (expected neel|ground|chi|up|down|custom)");
}

std::string InitialState::name() const {
    switch (kind) {
    case InitialStateKind::Neel: return "neel";
    case InitialStateKind::Ground: return "ground";
    case InitialStateKind::Chi: return "chi";
    case InitialStateKind::Up: return "up";
    case InitialStateKind::Down: return "down";
    case InitialStateKind::Custom: return "custom";
    }
    return "?";
}

StateVector initial_cs_state(const InitialState& state, int n_s, const TermList& cs_terms) {
    if (n_s < 1 || n_s > 12) throw ConfigError("initial_cs_state: n_s out of range");
    const std::uint64_t all_up = (std::uint64_t{1} << n_s) - 1;
    StateVector psi(n_s);
    switch (state.kind) {
    case InitialStateKind::Neel: {
        std::uint64_t x = 0;
        for (int i = 0; i < n_s; i += 2) x |= std::uint64_t{1} << i;
        psi[x] = 1.0;
        break;
    }
    case InitialStateKind::Up: psi[all_up] = 1.0; break;
    case InitialStateKind::Down: psi[0] = 1.0; break;
    case InitialStateKind::Chi:
        psi[all_up] = 1.0 / std::sqrt(10.0);
        psi[0] = 3.0 / std::sqrt(10.0);
        break;
    case InitialStateKind::Custom:
        psi = StateVector(n_s, state.amplitudes);
        psi.normalize();
        break;
    case InitialStateKind::Ground: {
        const Eigen::MatrixXcd h = dense_matrix(cs_terms, n_s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
        const auto& ev = solver.eigenvalues();
        if (ev.size() > 1 && ev(1) - ev(0) < 1e-9) {
            throw ConfigError("ground state of the CS Hamiltonian is degenerate");
        }
        Eigen::VectorXcd v = solver.eigenvectors().col(0);
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            if (std::abs(v(k)) > best + 1e-12) {
                best = std::abs(v(k));
                arg = k;
            }
        }
        v *= std::conj(v(arg)) / std::abs(v(arg));
        for (Eigen::Index k = 0; k < v.size(); ++k) psi[static_cast<std::size_t>(k)] = v(k);
        psi.normalize();
        break;
    }
    }
    return psi;
}

StateVector product_state(const StateVector& cs, const StateVector& env) {
    const int n = cs.n_sites() + env.n_sites();
    if (n > max_total_sites) throw ConfigError("product state exceeds " + std::to_string(max_total_sites) + " sites");
    StateVector out(n);
    const int shift = cs.n_sites();
    for (std::size_t e = 0; e < env.size(); ++e) {
        for (std::size_t s = 0; s < cs.size(); ++s) out[(e << shift) | s] = cs[s] * env[e];
    }
    return out;
}

TermList Model::cs_hat() const {
    TermList t = cs;
    t.insert(t.end(), anisotropy.begin(), anisotropy.end());
    return t;
}

TermList Model::full() const {
    TermList t = cs_hat();
    t.insert(t.end(), interaction.begin(), interaction.end());
    t.insert(t.end(), environment.begin(), environment.end());
    return t;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    void real(double v) { bytes(&v, sizeof v); }
};

}  // namespace

std::uint64_t Model::checksum() const {
    Fnv1a f;
    for (Eigen::Index i = 0; i < realization.i_matrix.size(); ++i) f.real(realization.i_matrix.data()[i]);
    for (Eigen::Index i = 0; i < realization.k_matrix.size(); ++i) f.real(realization.k_matrix.data()[i]);
    for (std::size_t n = 0; n < env_state.size(); ++n) {
        f.real(env_state[n].real());
        f.real(env_state[n].imag());
    }
    return f.h;
}

Model build_model(const ModelConfig& cfg) {
    cfg.validate();
    Model m;
    m.config = cfg;
    Rng rng(cfg.seed);
    m.cs = build_cs(cfg.n_s, cfg.j_s);
    m.anisotropy = build_anisotropy(cfg);
    m.interaction = build_interaction(cfg, rng, m.realization);
    m.environment = build_environment(cfg, rng, m.realization);
    m.env_state = sample_environment_state(cfg.n_e, rng);
    return m;
}

std::vector<std::uint32_t> patterns_with_up_count(int n_s, int n_up) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (1u << n_s); ++s) {
        if (std::popcount(s) == n_up) out.push_back(s);
    }
    return out;
}

}  // namespace spinbath
