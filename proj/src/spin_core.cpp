#include "spinbath/spin_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

// +1 for spin up (bit set), -1 for spin down.
inline double spin_sign(std::uint64_t x, int i) { return ((x >> i) & 1u) ? 1.0 : -1.0; }

void require_same_size(const StateVector& a, const StateVector& b, const char* what) {
    if (a.size() != b.size()) {
        throw UsageError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
}

}  // namespace

StateVector::StateVector(int n_sites) : n_sites_(n_sites) {
    if (n_sites < 0 || n_sites > max_register_sites) {
        throw ConfigError("register size out of range: " + std::to_string(n_sites) + " sites");
    }
    amps_.assign(std::size_t{1} << n_sites, cplx{0.0, 0.0});
}

StateVector::StateVector(int n_sites, std::vector<cplx> amplitudes) : StateVector(n_sites) {
    if (amplitudes.size() != amps_.size()) {
        throw UsageError("amplitude array has length " + std::to_string(amplitudes.size()) + ", expected " +
                         std::to_string(amps_.size()));
    }
    amps_ = std::move(amplitudes);
}

StateVector StateVector::basis_state(int n_sites, std::uint64_t index) {
    StateVector v(n_sites);
    if (index >= v.size()) throw UsageError("basis index out of range");
    v[index] = 1.0;
    return v;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) throw IntegrityError("cannot normalize a zero vector");
    for (auto& a : amps_) a /= n;
}

StateVector& StateVector::operator+=(const StateVector& other) {
    require_same_size(*this, other, "operator+=");
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
    require_same_size(*this, other, "operator-=");
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= other.amps_[i];
    return *this;
}

StateVector& StateVector::operator*=(cplx factor) {
    for (auto& a : amps_) a *= factor;
    return *this;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
    require_same_size(a, b, "inner_product");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double max_abs_difference(const StateVector& a, const StateVector& b) {
    require_same_size(a, b, "max_abs_difference");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void validate_term(const HamiltonianTerm& term, int n_sites) {
    auto in_range = [n_sites](int s) { return s >= 0 && s < n_sites; };
    if (!in_range(term.i) || (term.is_two_site() && !in_range(term.j))) {
        throw ConfigError("term site index out of range for " + std::to_string(n_sites) + " sites (i=" +
                          std::to_string(term.i) + ", j=" + std::to_string(term.j) + ")");
    }
    if (term.is_two_site() && term.i == term.j) {
        throw ConfigError("two-site term on identical sites " + std::to_string(term.i));
    }
    if (!std::isfinite(term.strength)) throw ConfigError("term strength is not finite");
}

void validate_terms(const TermList& terms, int n_sites) {
    for (const auto& t : terms) validate_term(t, n_sites);
}

double operator_norm(const HamiltonianTerm& term) {
    const double s = std::abs(term.strength);
    switch (term.kind) {
    case TermKind::HeisenbergBond: return 0.75 * s;
    case TermKind::IsingZZ: return 0.25 * s;
    case TermKind::FieldX: return 0.5 * s;
    case TermKind::XXBond: return 0.25 * s;
    }
    return 0.0;
}

EigenRange eigen_range(const HamiltonianTerm& term) {
    const double s = term.strength;
    if (term.kind == TermKind::HeisenbergBond) {
        // singlet -3/4, triplet +1/4
        return s >= 0 ? EigenRange{-0.75 * s, 0.25 * s} : EigenRange{0.25 * s, -0.75 * s};
    }
    const double n = operator_norm(term);
    return {-n, n};
}

StateVector apply_term(const HamiltonianTerm& term, const StateVector& psi) {
    validate_term(term, psi.n_sites());
    StateVector out(psi.n_sites());
    const double s = term.strength;
    const std::uint64_t dim = psi.size();
    switch (term.kind) {
    case TermKind::HeisenbergBond: {
        const std::uint64_t m = bit(term.i) | bit(term.j);
        for (std::uint64_t x = 0; x < dim; ++x) {
            const double zz = spin_sign(x, term.i) * spin_sign(x, term.j);
            out[x] += 0.25 * s * zz * psi[x];
            if (zz < 0) out[x ^ m] += 0.5 * s * psi[x];
        }
        break;
    }
    case TermKind::IsingZZ:
        for (std::uint64_t x = 0; x < dim; ++x) {
            out[x] = 0.25 * s * spin_sign(x, term.i) * spin_sign(x, term.j) * psi[x];
        }
        break;
    case TermKind::FieldX: {
        const std::uint64_t m = bit(term.i);
        for (std::uint64_t x = 0; x < dim; ++x) out[x ^ m] += 0.5 * s * psi[x];
        break;
    }
    case TermKind::XXBond: {
        const std::uint64_t m = bit(term.i) | bit(term.j);
        for (std::uint64_t x = 0; x < dim; ++x) out[x ^ m] += 0.25 * s * psi[x];
        break;
    }
    }
    return out;
}

StateVector apply_hamiltonian(const TermList& terms, const StateVector& psi) {
    validate_terms(terms, psi.n_sites());
    StateVector out(psi.n_sites());
    for (const auto& t : terms) out += apply_term(t, psi);
    return out;
}

StateVector apply_sz_sum(const StateVector& psi, int first, int count) {
    if (first < 0 || count < 0 || first + count > psi.n_sites()) throw UsageError("apply_sz_sum: site range");
    StateVector out(psi.n_sites());
    for (std::uint64_t x = 0; x < psi.size(); ++x) {
        double m = 0.0;
        for (int i = first; i < first + count; ++i) m += 0.5 * spin_sign(x, i);
        out[x] = m * psi[x];
    }
    return out;
}

Eigen::MatrixXcd dense_matrix(const TermList& terms, int n_sites) {
    if (n_sites > 12) throw UsageError("dense_matrix: register too large");
    validate_terms(terms, n_sites);
    const std::size_t dim = std::size_t{1} << n_sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        const StateVector col = apply_hamiltonian(terms, StateVector::basis_state(n_sites, k));
        for (std::size_t r = 0; r < dim; ++r) h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = col[r];
    }
    return h;
}

// ---------------------------------------------------------------------------
// CompiledHamiltonian
// ---------------------------------------------------------------------------

namespace {

constexpr int max_block_bits = 8;

inline bool bits_differ(std::uint64_t x, std::uint64_t a, std::uint64_t b) {
    return ((x & a) != 0) != ((x & b) != 0);
}

std::vector<std::uint32_t> all_patterns(int block_bits) {
    std::vector<std::uint32_t> p(std::size_t{1} << block_bits);
    for (std::uint32_t s = 0; s < p.size(); ++s) p[s] = s;
    return p;
}

}  // namespace

CompiledHamiltonian::CompiledHamiltonian(const TermList& terms, int n_sites, int block_bits)
    : CompiledHamiltonian(terms, n_sites, block_bits,
                          all_patterns(std::clamp(block_bits, 0, std::min(n_sites, max_block_bits)))) {}

CompiledHamiltonian::CompiledHamiltonian(const TermList& terms, int n_sites, int block_bits,
                                         std::vector<std::uint32_t> patterns)
    : n_sites_(n_sites), block_bits_(std::clamp(block_bits, 0, std::min(n_sites, max_block_bits))) {
    if (n_sites < 1 || n_sites > max_register_sites) throw ConfigError("register size out of range");
    validate_terms(terms, n_sites);

    const std::uint32_t block = 1u << block_bits_;
    const std::uint64_t low_mask = block - 1;
    n_blocks_ = std::size_t{1} << (n_sites_ - block_bits_);

    std::sort(patterns.begin(), patterns.end());
    patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
    if (patterns.empty()) throw UsageError("empty low-pattern set");
    pattern_index_.assign(block, -1);
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        if (patterns[p] >= block) throw UsageError("low pattern out of range");
        pattern_index_[patterns[p]] = static_cast<std::int32_t>(p);
    }
    patterns_ = std::move(patterns);
    const std::size_t np = patterns_.size();

    diag_.assign(dim(), 0.0);
    auto leaves_set = [](const char* what) {
        throw UsageError(std::string("low-pattern set is not invariant under the Hamiltonian (") + what + ")");
    };

    for (const auto& t : terms) {
        const EigenRange r = eigen_range(t);
        bounds_.lo += r.lo;
        bounds_.hi += r.hi;
        if (t.strength == 0.0) continue;

        std::uint64_t mask = 0, ca = 0, cb = 0;
        double coef = 0.0;
        switch (t.kind) {
        case TermKind::HeisenbergBond:
        case TermKind::IsingZZ: {
            const double q = 0.25 * t.strength;
            for (std::size_t e = 0; e < n_blocks_; ++e) {
                for (std::size_t p = 0; p < np; ++p) {
                    const std::uint64_t x = (e << block_bits_) | patterns_[p];
                    diag_[e * np + p] += q * spin_sign(x, t.i) * spin_sign(x, t.j);
                }
            }
            if (t.kind == TermKind::IsingZZ) continue;
            mask = bit(t.i) | bit(t.j);
            ca = bit(t.i);
            cb = bit(t.j);
            coef = 0.5 * t.strength;
            break;
        }
        case TermKind::FieldX:
            mask = bit(t.i);
            coef = 0.5 * t.strength;
            break;
        case TermKind::XXBond:
            mask = bit(t.i) | bit(t.j);
            coef = 0.25 * t.strength;
            break;
        }

        if ((mask & ~low_mask) == 0) {
            LowFlip f{std::vector<std::int32_t>(np, -1), coef};
            for (std::size_t p = 0; p < np; ++p) {
                const std::uint64_t s = patterns_[p];
                if (ca != 0 && !bits_differ(s, ca, cb)) continue;
                const std::int32_t q = pattern_index_[s ^ mask];
                if (q < 0) leaves_set("in-block flip");
                f.partner[p] = q;
            }
            low_flips_.push_back(std::move(f));
        } else if ((mask & low_mask) == 0) {
            high_flips_.push_back({mask >> block_bits_, ca >> block_bits_, cb >> block_bits_, coef});
        } else {
            for (auto s : patterns_) {
                if (pattern_index_[(s ^ mask) & low_mask] < 0) leaves_set("straddling flip");
            }
            mixed_flips_.push_back({mask, ca, cb, coef});
        }
    }
}

void CompiledHamiltonian::check_size(std::size_t n, const char* what) const {
    if (n != dim()) {
        throw UsageError(std::string(what) + ": compact vector has length " + std::to_string(n) + ", expected " +
                         std::to_string(dim()));
    }
}

std::vector<cplx> CompiledHamiltonian::gather(const StateVector& psi) const {
    if (psi.size() != full_dim()) throw UsageError("gather: register size mismatch");
    const std::uint64_t low_mask = (std::uint64_t{1} << block_bits_) - 1;
    for (std::size_t x = 0; x < psi.size(); ++x) {
        if (pattern_index_[x & low_mask] < 0 && psi[x] != cplx{0.0, 0.0}) {
            throw UsageError("gather: state has weight outside the active low-bit patterns");
        }
    }
    const std::size_t np = patterns_.size();
    std::vector<cplx> out(dim());
    for (std::size_t e = 0; e < n_blocks_; ++e) {
        for (std::size_t p = 0; p < np; ++p) out[e * np + p] = psi[(e << block_bits_) | patterns_[p]];
    }
    return out;
}

void CompiledHamiltonian::scatter(std::span<const cplx> compact, StateVector& psi) const {
    check_size(compact.size(), "scatter");
    if (psi.size() != full_dim()) psi = StateVector(n_sites_);
    std::fill(psi.data(), psi.data() + psi.size(), cplx{0.0, 0.0});
    const std::size_t np = patterns_.size();
    for (std::size_t e = 0; e < n_blocks_; ++e) {
        for (std::size_t p = 0; p < np; ++p) psi[(e << block_bits_) | patterns_[p]] = compact[e * np + p];
    }
}

template <class Combine>
void CompiledHamiltonian::sweep(std::span<const cplx> in, Combine&& combine) const {
    const std::int64_t n_blocks = static_cast<std::int64_t>(n_blocks_);
    const int nb = block_bits_;
    const std::size_t np = patterns_.size();
    const std::uint64_t low_mask = (std::uint64_t{1} << nb) - 1;
    const cplx* src = in.data();
    const double* diag = diag_.data();

#pragma omp parallel for schedule(static)
    for (std::int64_t e = 0; e < n_blocks; ++e) {
        std::array<cplx, std::size_t{1} << max_block_bits> h;
        const std::uint64_t ue = static_cast<std::uint64_t>(e);
        const std::size_t base = ue * np;
        const cplx* own = src + base;
        for (std::size_t p = 0; p < np; ++p) h[p] = diag[base + p] * own[p];

        for (const auto& f : high_flips_) {
            if (f.cond_a != 0 && !bits_differ(ue, f.cond_a, f.cond_b)) continue;
            const cplx* other = src + (ue ^ f.mask) * np;
            const double c = f.coef;
            for (std::size_t p = 0; p < np; ++p) h[p] += c * other[p];
        }
        for (const auto& f : low_flips_) {
            const std::int32_t* partner = f.partner.data();
            for (std::size_t p = 0; p < np; ++p) {
                if (partner[p] >= 0) h[p] += f.coef * own[partner[p]];
            }
        }
        for (const auto& f : mixed_flips_) {
            for (std::size_t p = 0; p < np; ++p) {
                const std::uint64_t x = (ue << nb) | patterns_[p];
                if (f.cond_a != 0 && !bits_differ(x, f.cond_a, f.cond_b)) continue;
                const std::uint64_t y = x ^ f.mask;
                h[p] += f.coef * src[(y >> nb) * np + static_cast<std::size_t>(pattern_index_[y & low_mask])];
            }
        }
        for (std::size_t p = 0; p < np; ++p) combine(base + p, h[p]);
    }
}

void CompiledHamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
    check_size(in.size(), "apply");
    check_size(out.size(), "apply");
    cplx* o = out.data();
    sweep(in, [o](std::size_t k, cplx hk) { o[k] = hk; });
}

StateVector CompiledHamiltonian::apply(const StateVector& psi) const {
    const std::vector<cplx> in = gather(psi);
    std::vector<cplx> out(dim());
    apply(in, out);
    StateVector result(n_sites_);
    scatter(out, result);
    return result;
}

void CompiledHamiltonian::apply_shifted(std::span<const cplx> in, std::span<cplx> out, double scale,
                                        double shift) const {
    check_size(in.size(), "apply_shifted");
    check_size(out.size(), "apply_shifted");
    cplx* o = out.data();
    const cplx* i = in.data();
    sweep(in, [o, i, scale, shift](std::size_t k, cplx hk) { o[k] = scale * (hk - shift * i[k]); });
}

void CompiledHamiltonian::chebyshev_step(std::span<const cplx> cur, std::span<cplx> prev_next, std::span<cplx> acc,
                                         double scale, double shift, cplx coef) const {
    check_size(cur.size(), "chebyshev_step");
    check_size(prev_next.size(), "chebyshev_step");
    check_size(acc.size(), "chebyshev_step");
    cplx* pn = prev_next.data();
    cplx* a = acc.data();
    const cplx* c = cur.data();
    const double two_scale = 2.0 * scale;
    sweep(cur, [=](std::size_t k, cplx hk) {
        const cplx next = two_scale * (hk - shift * c[k]) - pn[k];
        pn[k] = next;
        a[k] += coef * next;
    });
}

}  // namespace spinbath
