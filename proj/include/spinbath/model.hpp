#pragma once

// Hamiltonians, random couplings and initial states of a small Heisenberg
// ring (the central system, CS) coupled to a random spin bath.
//
// CS sites occupy register sites [0, n_s), environment site k sits at n_s + k.
// All energies are in units of J_S, times in units of hbar/J_S.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinbath/spin_core.hpp"

namespace spinbath {

inline constexpr int max_total_sites = 24;

// Seeded source of all random draws. The engine is mt19937_64; uniforms are
// formed from the top 53 bits of each output so that streams are portable
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard complex Gaussian via Box-Muller from two consecutive uniforms.
    cplx gaussian_complex();

private:
    std::mt19937_64 engine_;
};

enum class AnisotropyKind { None, TransverseField, Dipolar };

struct Anisotropy {
    AnisotropyKind kind = AnisotropyKind::None;
    double strength = 0.0;  // h^x or J_S^xx
};

struct ModelConfig {
    int n_s = 4;
    int n_e = 12;
    double j_s = 1.0;
    double i_strength = 0.0;
    double k_strength = 0.0;
    Anisotropy anisotropy;
    std::uint64_t seed = 1;

    int n_sites() const { return n_s + n_e; }
    void validate() const;  // throws ConfigError
};

struct CouplingRealization {
    Eigen::MatrixXd i_matrix;  // n_s x n_e, I_ik = I r_ik
    Eigen::MatrixXd k_matrix;  // n_e x n_e symmetric, zero diagonal
    Eigen::VectorXd alpha;     // alpha_k = sum_i I_ik / 2
};

TermList build_cs(int n_s, double j_s);
TermList build_interaction(const ModelConfig& cfg, Rng& rng, CouplingRealization& realization);
TermList build_environment(const ModelConfig& cfg, Rng& rng, CouplingRealization& realization);
TermList build_anisotropy(const ModelConfig& cfg);

StateVector sample_environment_state(int n_e, Rng& rng);

enum class InitialStateKind { Neel, Ground, Chi, Up, Down, Custom };

struct InitialState {
    InitialStateKind kind = InitialStateKind::Neel;
    std::vector<cplx> amplitudes;  // Custom only

    static InitialState parse(const std::string& name);  // neel|ground|chi|up|down
    std::string name() const;
};

// `cs_terms` defines the ground state. Throws ConfigError if it is degenerate.
StateVector initial_cs_state(const InitialState& state, int n_s, const TermList& cs_terms);

// CS on the low bits, environment on the high bits.
StateVector product_state(const StateVector& cs, const StateVector& env);

// Everything drawn for one run, in the fixed order: CS-environment couplings
// (row-major over (i, k)), environment couplings (upper triangle row-major),
// environment state (Box-Muller pairs in basis order).
struct Model {
    ModelConfig config;
    TermList cs;          // H_S
    TermList anisotropy;  // H_S' or H_S'' (possibly empty)
    TermList interaction; // H_I
    TermList environment; // H_E
    CouplingRealization realization;
    StateVector env_state;

    TermList cs_hat() const;  // H_S + anisotropy
    TermList full() const;    // all terms
    std::uint64_t checksum() const;
};

Model build_model(const ModelConfig& cfg);

// Low-bit CS patterns with a given number of up spins.
std::vector<std::uint32_t> patterns_with_up_count(int n_s, int n_up);

}  // namespace spinbath
