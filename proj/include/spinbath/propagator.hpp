#pragma once

// Time evolution exp(-iHt) by Chebyshev polynomial expansion.
//
// With the spectrum of H enclosed in [center - B, center + B] and
// Hs = (H - center)/B,
//
//   exp(-iHt) = exp(-i center t) sum_n (2 - delta_n0) (-i)^n J_n(Bt) T_n(Hs),
//
// evaluated with the recurrence phi_{n+1} = 2 Hs phi_n - phi_{n-1}.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spinbath/spin_core.hpp"

namespace spinbath {

inline constexpr double default_epsilon = 1e-12;

// Largest B*dt handled in one expansion; longer steps are split.
inline constexpr double max_chunk_phase = 2000.0;

// J_0(x) .. J_{n_max}(x) for x >= 0 by downward recurrence (Miller's
// algorithm) normalized with J_0 + 2 sum_k J_2k = 1.
std::vector<double> bessel_j_sequence(int n_max, double x);

struct SpectralWindow {
    double center = 0.0;
    double half_width = 0.0;  // B

    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
};

// B = 1.05 * sum of term operator norms, centered at zero. Always encloses
// the spectrum. Throws ConfigError for an empty TermList.
SpectralWindow spectral_bound(const TermList& terms);

// Tighter window: extreme Ritz values of a Lanczos run on the (possibly
// sector-restricted) operator, widened by the Ritz residuals plus `margin`
// times the spectral width, then clipped to the rigorous per-term enclosure.
// Any eigenvalue left outside would make the expansion grow and is caught by
// the norm check in Propagator.
SpectralWindow lanczos_window(const CompiledHamiltonian& ham, int steps = 80, double margin = 0.05,
                              std::uint64_t seed = 0x5eed);

struct ChebyshevPlan {
    int order = 0;                   // M
    std::vector<cplx> coefficients;  // c_0 .. c_M
    double epsilon = default_epsilon;
};

// Smallest M with |c_n| < epsilon for all n >= M. Throws UsageError for t < 0
// or epsilon outside (0, 1e-6].
ChebyshevPlan plan(double t, const SpectralWindow& window, double epsilon);

class Propagator {
public:
    Propagator(CompiledHamiltonian ham, SpectralWindow window, double epsilon = default_epsilon);

    // Advance psi in place by dt >= 0 (split into chunks with B*dt <= max_chunk_phase).
    // Throws IntegrityError if the norm drifts by more than norm_tolerance().
    void advance(StateVector& psi, double dt);

    const CompiledHamiltonian& hamiltonian() const { return ham_; }
    const SpectralWindow& window() const { return window_; }
    double epsilon() const { return epsilon_; }
    double norm_tolerance() const { return 10.0 * epsilon_ + 1e-13; }
    std::size_t matvec_count() const { return matvecs_; }

private:
    void advance_chunk(std::vector<cplx>& psi, double dt);

    CompiledHamiltonian ham_;
    SpectralWindow window_;
    double epsilon_;
    std::size_t matvecs_ = 0;
    std::vector<cplx> phi_a_, phi_b_, acc_;
};

// U(t) psi with the conservative spectral_bound window.
StateVector evolve(const StateVector& psi, const TermList& terms, double t, double epsilon = default_epsilon);

// Throws UsageError unless grid is strictly ascending with grid[0] >= 0.
void validate_grid(std::span<const double> grid);

// Calls visit(index, t, psi(t)) for each grid point, chaining increments.
void for_each_checkpoint(Propagator& prop, StateVector psi, std::span<const double> grid,
                         const std::function<void(std::size_t, double, const StateVector&)>& visit);

std::vector<StateVector> sample_trajectory(const StateVector& psi0, const TermList& terms,
                                           std::span<const double> grid, double epsilon = default_epsilon);

}  // namespace spinbath
