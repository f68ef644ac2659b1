#pragma once

// Bit-encoded spin-1/2 registers and matrix-free spin-coupling terms.
//
// Basis convention: amplitude index bit i holds spin i, bit value 1 = up,
// 0 = down. Site 0 is the least significant bit. Spin operators are
// S^a = sigma^a / 2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spinbath {

using cplx = std::complex<double>;

inline constexpr int max_register_sites = 30;

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(int n_sites);
    StateVector(int n_sites, std::vector<cplx> amplitudes);

    static StateVector basis_state(int n_sites, std::uint64_t index);

    int n_sites() const { return n_sites_; }
    std::size_t size() const { return amps_.size(); }

    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    std::span<cplx> amplitudes() { return amps_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx* data() { return amps_.data(); }
    const cplx* data() const { return amps_.data(); }

    double norm() const;
    void normalize();

    StateVector& operator+=(const StateVector& other);
    StateVector& operator-=(const StateVector& other);
    StateVector& operator*=(cplx factor);

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(cplx f, StateVector a) { return a *= f; }

private:
    int n_sites_ = 0;
    std::vector<cplx> amps_;
};

// <a|b>, conjugating a.
cplx inner_product(const StateVector& a, const StateVector& b);

// Largest |a_i - b_i|.
double max_abs_difference(const StateVector& a, const StateVector& b);

enum class TermKind {
    HeisenbergBond,  // s * S_i . S_j
    IsingZZ,         // s * S^z_i S^z_j
    FieldX,          // s * S^x_i
    XXBond,          // s * S^x_i S^x_j
};

struct HamiltonianTerm {
    TermKind kind = TermKind::IsingZZ;
    int i = 0;
    int j = 0;  // unused for FieldX
    double strength = 0.0;

    static HamiltonianTerm heisenberg(int i, int j, double s) { return {TermKind::HeisenbergBond, i, j, s}; }
    static HamiltonianTerm ising_zz(int i, int j, double s) { return {TermKind::IsingZZ, i, j, s}; }
    static HamiltonianTerm field_x(int i, double s) { return {TermKind::FieldX, i, i, s}; }
    static HamiltonianTerm xx_bond(int i, int j, double s) { return {TermKind::XXBond, i, j, s}; }

    bool is_two_site() const { return kind != TermKind::FieldX; }

    friend bool operator==(const HamiltonianTerm&, const HamiltonianTerm&) = default;
};

using TermList = std::vector<HamiltonianTerm>;

// Throws ConfigError if the term's sites or strength are invalid for n_sites.
void validate_term(const HamiltonianTerm& term, int n_sites);
void validate_terms(const TermList& terms, int n_sites);

// Operator norm of a single term: 3|s|/4, |s|/4, |s|/2, |s|/4 by kind.
double operator_norm(const HamiltonianTerm& term);

// Smallest and largest eigenvalue of a single term.
struct EigenRange {
    double lo = 0.0;
    double hi = 0.0;
};
EigenRange eigen_range(const HamiltonianTerm& term);

StateVector apply_term(const HamiltonianTerm& term, const StateVector& psi);
StateVector apply_hamiltonian(const TermList& terms, const StateVector& psi);

// sum_{i in [first, first+count)} S^z_i applied to psi.
StateVector apply_sz_sum(const StateVector& psi, int first, int count);

// Dense 2^n x 2^n matrix, column k = H|k>. Intended for n <= 10.
Eigen::MatrixXcd dense_matrix(const TermList& terms, int n_sites);

// Precompiled, matrix-free form of a TermList for repeated matvecs.
//
// The register is viewed as blocks of 2^block_bits amplitudes (the low
// sites). Diagonal contributions of every term are folded into one cached
// diagonal; spin flips are split into flips acting only inside a block, flips
// acting only on the high sites, and flips straddling both.
//
// Work vectors use a compact layout: only amplitudes whose low bits form one
// of the active patterns are stored, at index block * n_patterns + p. By
// default every pattern is active. Restricting to a conserved low-site sector
// skips amplitudes that stay zero.
class CompiledHamiltonian {
public:
    CompiledHamiltonian(const TermList& terms, int n_sites, int block_bits);

    // Throws UsageError if the flips can move amplitude out of the pattern set.
    CompiledHamiltonian(const TermList& terms, int n_sites, int block_bits, std::vector<std::uint32_t> patterns);

    int n_sites() const { return n_sites_; }
    std::size_t full_dim() const { return std::size_t{1} << n_sites_; }
    std::size_t dim() const { return n_blocks_ * patterns_.size(); }  // compact length
    int block_bits() const { return block_bits_; }
    std::span<const std::uint32_t> low_patterns() const { return patterns_; }

    // Full register <-> compact layout. gather throws UsageError if psi has
    // weight outside the active patterns.
    std::vector<cplx> gather(const StateVector& psi) const;
    void scatter(std::span<const cplx> compact, StateVector& psi) const;

    // out = H in. `in` and `out` must not alias.
    void apply(std::span<const cplx> in, std::span<cplx> out) const;
    StateVector apply(const StateVector& psi) const;

    // out = scale * (H - shift) in.
    void apply_shifted(std::span<const cplx> in, std::span<cplx> out, double scale, double shift) const;

    // Chebyshev recurrence step on Hs = scale * (H - shift):
    //   prev_next <- 2 Hs cur - prev_next,   acc += coef * prev_next.
    void chebyshev_step(std::span<const cplx> cur, std::span<cplx> prev_next, std::span<cplx> acc, double scale,
                        double shift, cplx coef) const;

    // Rigorous spectrum enclosure from per-term eigenvalue ranges.
    EigenRange term_bounds() const { return bounds_; }

private:
    struct HighFlip {
        std::uint64_t mask = 0;  // in block-index bits
        std::uint64_t cond_a = 0;
        std::uint64_t cond_b = 0;  // both 0: unconditional
        double coef = 0.0;
    };
    struct LowFlip {
        std::vector<std::int32_t> partner;  // per pattern, -1 if the flip does not fire
        double coef = 0.0;
    };
    struct MixedFlip {
        std::uint64_t mask = 0;  // full-register bits
        std::uint64_t cond_a = 0;
        std::uint64_t cond_b = 0;
        double coef = 0.0;
    };

    template <class Combine>
    void sweep(std::span<const cplx> in, Combine&& combine) const;
    void check_size(std::size_t n, const char* what) const;

    int n_sites_ = 0;
    int block_bits_ = 0;
    std::size_t n_blocks_ = 0;
    std::vector<std::uint32_t> patterns_;
    std::vector<std::int32_t> pattern_index_;  // low pattern -> p, or -1
    std::vector<double> diag_;                 // compact
    std::vector<HighFlip> high_flips_;
    std::vector<LowFlip> low_flips_;
    std::vector<MixedFlip> mixed_flips_;
    EigenRange bounds_;
};

}  // namespace spinbath
