#include "spinbath/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinbath/errors.hpp"

namespace spinbath {

std::vector<double> bessel_j_sequence(int n_max, double x) {
    if (n_max < 0) throw UsageError("bessel_j_sequence: negative order");
    if (!(x >= 0.0) || !std::isfinite(x)) throw UsageError("bessel_j_sequence: argument must be finite and >= 0");
    std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }

    const double top = std::max(static_cast<double>(n_max), x);
    int start = static_cast<int>(top) + 16 + static_cast<int>(std::sqrt(40.0 * (top + 1.0)));
    start += start % 2;  // even, so the normalization sum pairs up

    constexpr double big = 1e250;
    double above = 0.0;  // J_{k+1}
    double cur = 1e-300; // J_k, arbitrary seed
    double sum = 0.0;    // J_0 + 2 sum J_2k, accumulated unnormalized
    for (int k = start; k >= 1; --k) {
        const double below = (2.0 * k / x) * cur - above;
        above = cur;
        cur = below;  // J_{k-1}
        const int n = k - 1;
        if (n <= n_max) j[static_cast<std::size_t>(n)] = cur;
        if (n > 0 && n % 2 == 0) sum += 2.0 * cur;
        if (std::abs(cur) > big) {
            cur /= big;
            above /= big;
            sum /= big;
            for (int m = n; m <= n_max; ++m) j[static_cast<std::size_t>(m)] /= big;
        }
    }
    sum += cur;  // J_0
    for (auto& v : j) v /= sum;
    return j;
}

SpectralWindow spectral_bound(const TermList& terms) {
    if (terms.empty()) throw ConfigError("spectral_bound: empty term list");
    double s = 0.0;
    for (const auto& t : terms) s += operator_norm(t);
    // H == 0: any positive half-width encloses the spectrum.
    return {0.0, s > 0.0 ? 1.05 * s : 1.0};
}

SpectralWindow lanczos_window(const CompiledHamiltonian& ham, int steps, double margin, std::uint64_t seed) {
    const EigenRange rigorous = ham.term_bounds();
    const std::size_t dim = ham.dim();

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<cplx> v(dim), w(dim), v_prev(dim, 0.0);
    double nrm = 0.0;
    for (auto& a : v) {
        a = {normal(gen), normal(gen)};
        nrm += std::norm(a);
    }
    nrm = std::sqrt(nrm);
    for (auto& a : v) a /= nrm;

    steps = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(steps, 2)), dim));
    std::vector<double> alpha, beta;
    double b_prev = 0.0;
    for (int k = 0; k < steps; ++k) {
        ham.apply(v, w);
        double a = 0.0;
        for (std::size_t x = 0; x < dim; ++x) a += std::real(std::conj(v[x]) * w[x]);
        double b = 0.0;
        for (std::size_t x = 0; x < dim; ++x) {
            w[x] -= a * v[x] + b_prev * v_prev[x];
            b += std::norm(w[x]);
        }
        b = std::sqrt(b);
        alpha.push_back(a);
        beta.push_back(b);
        if (b < 1e-12) break;  // invariant subspace
        std::swap(v_prev, v);
        for (std::size_t x = 0; x < dim; ++x) v[x] = w[x] / b;
        b_prev = b;
    }

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag(m), sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i < m; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    // The implicit QR iteration can fail to converge; the term bounds are always safe.
    if (tri.info() != Eigen::Success) {
        return {0.5 * (rigorous.lo + rigorous.hi), rigorous.hi > rigorous.lo ? 0.5 * (rigorous.hi - rigorous.lo) : 1.0};
    }
    const auto& theta = tri.eigenvalues();
    const double last_beta = beta.back();
    const double resid_lo = std::abs(last_beta * tri.eigenvectors()(m - 1, 0));
    const double resid_hi = std::abs(last_beta * tri.eigenvectors()(m - 1, m - 1));

    const double width = std::max(theta(m - 1) - theta(0), 1e-12);
    double lo = theta(0) - resid_lo - margin * width;
    double hi = theta(m - 1) + resid_hi + margin * width;
    lo = std::max(lo, rigorous.lo);
    hi = std::min(hi, rigorous.hi);
    if (!(hi > lo)) {
        // Degenerate spectrum (e.g. H proportional to identity on the sector).
        lo -= 1.0;
        hi += 1.0;
    }
    return {0.5 * (lo + hi), 0.5 * (hi - lo)};
}

ChebyshevPlan plan(double t, const SpectralWindow& window, double epsilon) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("plan: t must be finite and >= 0 (evolve backwards by conjugation)");
    if (!(epsilon > 0.0 && epsilon <= 1e-6)) throw UsageError("plan: epsilon must lie in (0, 1e-6]");
    if (!(window.half_width > 0.0)) throw UsageError("plan: spectral half-width must be positive");

    ChebyshevPlan p;
    p.epsilon = epsilon;
    if (t == 0.0) {
        p.order = 0;
        p.coefficients = {cplx{1.0, 0.0}};
        return p;
    }

    const double x = window.half_width * t;
    int search = static_cast<int>(std::ceil(x + 20.0 * std::cbrt(x) + 30.0));
    std::vector<double> j = bessel_j_sequence(search, x);
    while (2.0 * std::abs(j.back()) >= epsilon) {
        search *= 2;
        j = bessel_j_sequence(search, x);
    }
    int order = search;
    while (order > 1 && 2.0 * std::abs(j[static_cast<std::size_t>(order - 1)]) < epsilon) --order;

    p.order = order;
    p.coefficients.resize(static_cast<std::size_t>(order) + 1);
    const cplx phase = std::polar(1.0, -window.center * t);
    const cplx minus_i{0.0, -1.0};
    cplx ipow{1.0, 0.0};
    for (int n = 0; n <= order; ++n) {
        const double weight = n == 0 ? 1.0 : 2.0;
        p.coefficients[static_cast<std::size_t>(n)] = phase * ipow * (weight * j[static_cast<std::size_t>(n)]);
        ipow *= minus_i;
    }
    return p;
}

namespace {

double compact_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return std::sqrt(s);
}

}  // namespace

Propagator::Propagator(CompiledHamiltonian ham, SpectralWindow window, double epsilon)
    : ham_(std::move(ham)), window_(window), epsilon_(epsilon) {
    if (!(window_.half_width > 0.0)) throw UsageError("Propagator: spectral half-width must be positive");
    if (!(epsilon_ > 0.0 && epsilon_ <= 1e-6)) throw UsageError("Propagator: epsilon must lie in (0, 1e-6]");
}

void Propagator::advance(StateVector& psi, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw UsageError("Propagator::advance: dt must be finite and >= 0");
    if (psi.size() != ham_.full_dim()) throw UsageError("Propagator::advance: state size mismatch");
    if (dt == 0.0) return;
    const int chunks = std::max(1, static_cast<int>(std::ceil(window_.half_width * dt / max_chunk_phase)));
    const double step = dt / chunks;
    std::vector<cplx> work = ham_.gather(psi);
    const double norm_before = compact_norm(work);
    for (int c = 0; c < chunks; ++c) advance_chunk(work, step);
    const double norm_after = compact_norm(work);
    ham_.scatter(work, psi);
    if (std::abs(norm_after - norm_before) > norm_tolerance() * std::max(1.0, norm_before)) {
        throw IntegrityError("Chebyshev propagation lost unitarity: norm " + std::to_string(norm_before) + " -> " +
                             std::to_string(norm_after));
    }
}

void Propagator::advance_chunk(std::vector<cplx>& psi, double dt) {
    const ChebyshevPlan p = plan(dt, window_, epsilon_);
    const std::size_t dim = psi.size();
    const double scale = 1.0 / window_.half_width;
    const double shift = window_.center;

    phi_a_.assign(psi.data(), psi.data() + dim);
    acc_.assign(dim, cplx{0.0, 0.0});
    for (std::size_t x = 0; x < dim; ++x) acc_[x] = p.coefficients[0] * phi_a_[x];
    if (p.order >= 1) {
        phi_b_.assign(dim, cplx{0.0, 0.0});
        ham_.apply_shifted(phi_a_, phi_b_, scale, shift);
        ++matvecs_;
        const cplx c1 = p.coefficients[1];
        for (std::size_t x = 0; x < dim; ++x) acc_[x] += c1 * phi_b_[x];
        // phi_a holds phi_{n-2}, phi_b holds phi_{n-1}
        for (int n = 2; n <= p.order; ++n) {
            ham_.chebyshev_step(phi_b_, phi_a_, acc_, scale, shift, p.coefficients[static_cast<std::size_t>(n)]);
            ++matvecs_;
            std::swap(phi_a_, phi_b_);
        }
    }
    std::swap(psi, acc_);
}

StateVector evolve(const StateVector& psi, const TermList& terms, double t, double epsilon) {
    CompiledHamiltonian ham(terms, psi.n_sites(), std::min(psi.n_sites(), 4));
    Propagator prop(std::move(ham), spectral_bound(terms), epsilon);
    StateVector out = psi;
    prop.advance(out, t);
    return out;
}

void validate_grid(std::span<const double> grid) {
    if (grid.empty()) throw UsageError("time grid is empty");
    if (!(grid[0] >= 0.0)) throw UsageError("time grid must start at t >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw UsageError("time grid must be strictly ascending");
    }
}

void for_each_checkpoint(Propagator& prop, StateVector psi, std::span<const double> grid,
                         const std::function<void(std::size_t, double, const StateVector&)>& visit) {
    validate_grid(grid);
    double t = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        prop.advance(psi, grid[k] - t);
        t = grid[k];
        visit(k, t, psi);
    }
}

std::vector<StateVector> sample_trajectory(const StateVector& psi0, const TermList& terms,
                                           std::span<const double> grid, double epsilon) {
    CompiledHamiltonian ham(terms, psi0.n_sites(), std::min(psi0.n_sites(), 4));
    Propagator prop(std::move(ham), spectral_bound(terms), epsilon);
    std::vector<StateVector> out;
    out.reserve(grid.size());
    for_each_checkpoint(prop, psi0, grid,
                        [&out](std::size_t, double, const StateVector& psi) { out.push_back(psi); });
    return out;
}

}  // namespace spinbath
