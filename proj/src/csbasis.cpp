#include "spinbath/csbasis.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "spinbath/errors.hpp"

namespace spinbath {

HalfInteger HalfInteger::from_double(double v) { return {static_cast<int>(std::lround(2.0 * v))}; }

std::string HalfInteger::str() const {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

std::string CsLabel::ket() const {
    char e[32];
    std::snprintf(e, sizeof e, "%.6g", std::abs(energy) < 1e-12 ? 0.0 : energy);
    return "|" + s_tot.str() + "," + sz.str() + "," + e + ">";
}

Eigen::MatrixXcd total_spin_squared(int n_s) {
    // S^2 = 3N/4 + 2 sum_{i<j} S_i . S_j
    TermList pairs;
    for (int i = 0; i < n_s; ++i) {
        for (int j = i + 1; j < n_s; ++j) pairs.push_back(HamiltonianTerm::heisenberg(i, j, 2.0));
    }
    const Eigen::Index dim = Eigen::Index{1} << n_s;
    Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Identity(dim, dim) * (0.75 * n_s);
    if (!pairs.empty()) s2 += dense_matrix(pairs, n_s);
    return s2;
}

Eigen::MatrixXcd total_sz(int n_s) {
    const Eigen::Index dim = Eigen::Index{1} << n_s;
    Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
        sz(x, x) = 0.5 * (2 * std::popcount(static_cast<unsigned>(x)) - n_s);
    }
    return sz;
}

namespace {

// Orthonormal basis of span(w) built from projected unit vectors e_k, k in
// `indices` order, each with its first nonzero coordinate real positive.
Eigen::MatrixXcd canonical_basis(const Eigen::MatrixXcd& w, const std::vector<Eigen::Index>& indices) {
    const Eigen::Index k = w.cols();
    Eigen::MatrixXcd out(w.rows(), k);
    Eigen::Index found = 0;
    for (Eigen::Index idx : indices) {
        if (found == k) break;
        Eigen::VectorXcd v = w * w.row(idx).adjoint();  // P e_idx
        for (Eigen::Index c = 0; c < found; ++c) v -= out.col(c) * out.col(c).dot(v);
        for (Eigen::Index c = 0; c < found; ++c) v -= out.col(c) * out.col(c).dot(v);
        const double n = v.norm();
        if (n < 1e-6) continue;
        v /= n;
        for (Eigen::Index r = 0; r < v.size(); ++r) {
            if (std::abs(v(r)) > 1e-10) {
                v *= std::conj(v(r)) / std::abs(v(r));
                break;
            }
        }
        out.col(found++) = v;
    }
    if (found != k) throw IntegrityError("eigenbasis canonicalization lost rank");
    return out;
}

double max_commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace

CsEigenbasis build_eigenbasis(const TermList& cs_terms, int n_s) {
    if (n_s < 1 || n_s > 10) throw ConfigError("build_eigenbasis: n_s out of range");
    const Eigen::MatrixXcd h = dense_matrix(cs_terms, n_s);
    const Eigen::MatrixXcd s2 = total_spin_squared(n_s);
    const Eigen::MatrixXcd sz = total_sz(n_s);
    if (max_commutator(h, sz) > 1e-10 || max_commutator(h, s2) > 1e-10) {
        throw ConfigError("no simultaneous eigenbasis: CS Hamiltonian breaks S^z_tot or S^2_tot conservation");
    }

    const Eigen::Index dim = Eigen::Index{1} << n_s;
    CsEigenbasis basis;
    basis.n_s = n_s;
    basis.vectors.resize(dim, dim);
    Eigen::Index col = 0;

    for (int n_up = 0; n_up <= n_s; ++n_up) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index x = 0; x < dim; ++x) {
            if (std::popcount(static_cast<unsigned>(x)) == n_up) idx.push_back(x);
        }
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd block(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) block(a, b) = h(idx[a], idx[b]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
        // embed sector eigenvectors in full coordinates
        Eigen::MatrixXcd vecs = Eigen::MatrixXcd::Zero(dim, m);
        for (Eigen::Index a = 0; a < m; ++a) vecs.row(idx[a]) = es.eigenvectors().row(a);

        const HalfInteger sz_label{2 * n_up - n_s};
        for (Eigen::Index start = 0; start < m;) {
            Eigen::Index stop = start + 1;
            while (stop < m && es.eigenvalues()(stop) - es.eigenvalues()(start) < degeneracy_threshold) ++stop;
            const double energy = es.eigenvalues().segment(start, stop - start).mean();
            const Eigen::MatrixXcd level = vecs.middleCols(start, stop - start);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> spin(level.adjoint() * s2 * level);
            const auto k = level.cols();
            for (Eigen::Index s0 = 0; s0 < k;) {
                Eigen::Index s1 = s0 + 1;
                while (s1 < k && spin.eigenvalues()(s1) - spin.eigenvalues()(s0) < 1e-6) ++s1;
                const double lambda = spin.eigenvalues()(s0);
                const HalfInteger s_tot = HalfInteger::from_double(0.5 * (std::sqrt(1.0 + 4.0 * lambda) - 1.0));
                const Eigen::MatrixXcd sub = level * spin.eigenvectors().middleCols(s0, s1 - s0);
                const Eigen::MatrixXcd canon = canonical_basis(sub, idx);
                for (Eigen::Index c = 0; c < canon.cols(); ++c) {
                    basis.vectors.col(col++) = canon.col(c);
                    basis.labels.push_back({s_tot, sz_label, energy});
                }
                s0 = s1;
            }
            start = stop;
        }
    }
    return basis;
}

ReducedDensityMatrix transform_rdm(const ReducedDensityMatrix& rho, const CsEigenbasis& basis) {
    if (rho.basis() != BasisTag::Computational) throw UsageError("transform_rdm: expects a computational-basis RDM");
    if (rho.dim() != basis.vectors.rows()) throw UsageError("transform_rdm: dimension mismatch");
    Eigen::MatrixXcd t = basis.vectors.adjoint() * rho.entries() * basis.vectors;
    return ReducedDensityMatrix(std::move(t), BasisTag::CsEigen);
}

double sector_max_entropy(int n_s, HalfInteger sz) {
    // sz = n_up - n_s/2
    const int twice_up = sz.twice + n_s;
    if (n_s < 1 || twice_up < 0 || twice_up > 2 * n_s || twice_up % 2 != 0) {
        throw ConfigError("no S^z_tot = " + sz.str() + " sector for " + std::to_string(n_s) + " spins");
    }
    const int n_up = twice_up / 2;
    return std::lgamma(n_s + 1.0) - std::lgamma(n_up + 1.0) - std::lgamma(n_s - n_up + 1.0);
}

}  // namespace spinbath
