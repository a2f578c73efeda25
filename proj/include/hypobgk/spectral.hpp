#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypobgk/errors.hpp"

namespace hypobgk {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using CMatrixXd = CMatrix<double>;
using CVectorXd = CVector<double>;

/// Smallest Hermite truncation for which the Lyapunov block fits.
inline constexpr int kMinTruncation = 5;

/// Hermite coefficients of one spatial Fourier mode.
template <typename Real>
struct HermiteVec {
    int k = 0;
    CVector<Real> coeffs;
};

/// Fourier/Hermite truncation of the periodic domain of length L.
/// Only k = 0..K are stored, negative modes follow by conjugate symmetry.
struct ModeLattice {
    int K = 1;
    double L = 2.0 * std::numbers::pi;
    double l = 1.0;  ///< wavenumber unit 2*pi/L
    int M = kMinTruncation;
};

inline ModeLattice make_lattice(int K, double L, int M) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("domain length L must be positive and finite");
    if (K < 1) throw DomainError("mode count K must be >= 1");
    if (M < kMinTruncation) throw DomainError("Hermite truncation M must be >= 5, got " + std::to_string(M));
    return ModeLattice{K, L, 2.0 * std::numbers::pi / L, M};
}

/// Truncated streaming (multiplication by v) and relaxation operators.
template <typename Real>
struct OperatorSet {
    RMatrix<Real> stream;  ///< symmetric tridiagonal, off-diagonals sqrt(m+1)
    RMatrix<Real> relax;   ///< diag(0,0,0,1,...,1)

    int size() const { return static_cast<int>(stream.rows()); }
};

template <typename Real>
struct MomentTriple {
    std::complex<Real> omega;
    std::complex<Real> mu;
    std::complex<Real> tau;
};

/// Streaming matrix without the size check; also serves as the Jacobi matrix
/// of the Gauss-Hermite rule.
template <typename Real = double>
RMatrix<Real> stream_matrix(int M) {
    RMatrix<Real> s = RMatrix<Real>::Zero(M, M);
    for (int m = 0; m + 1 < M; ++m) {
        const Real c = std::sqrt(static_cast<Real>(m + 1));
        s(m, m + 1) = c;
        s(m + 1, m) = c;
    }
    return s;
}

template <typename Real = double>
RMatrix<Real> relax_matrix(int M) {
    RVector<Real> d = RVector<Real>::Ones(M);
    d.head(std::min(M, 3)).setZero();
    return d.asDiagonal();
}

template <typename Real = double>
OperatorSet<Real> build_operators(int M) {
    if (M < kMinTruncation) throw DomainError("Hermite truncation M must be >= 5, got " + std::to_string(M));
    return OperatorSet<Real>{stream_matrix<Real>(M), relax_matrix<Real>(M)};
}

/// C_k = i k l L1 + sigma L2; the mode ODE is d/dt h_k = -C_k h_k.
template <typename Real>
CMatrix<Real> assemble_generator(int k, Real l, Real sigma, const OperatorSet<Real>& ops) {
    if (!(sigma > 0)) throw InvalidModelError("collision frequency must be positive");
    if (!(l > 0)) throw DomainError("wavenumber unit l must be positive");
    using C = std::complex<Real>;
    return C(0, static_cast<Real>(k) * l) * ops.stream.template cast<C>() + C(sigma, 0) * ops.relax.template cast<C>();
}

/// Mass, momentum and energy modes from the first three Hermite coefficients.
template <typename Real>
MomentTriple<Real> moments_of(const HermiteVec<Real>& v) {
    if (v.coeffs.size() < 3) throw UsageError("moments_of needs at least 3 Hermite coefficients");
    return {v.coeffs(0), v.coeffs(1), v.coeffs(0) + std::sqrt(Real(2)) * v.coeffs(2)};
}

/// Values psi_m(v) = He_m(v)/sqrt(m!) for m < M, from the three-term recurrence
/// He_{m+1} = v He_m - m He_{m-1} rescaled to avoid factorial growth.
template <typename Real>
RVector<Real> normalized_hermite(Real v, int M) {
    RVector<Real> psi(M);
    if (M == 0) return psi;
    psi(0) = 1;
    if (M > 1) psi(1) = v;
    for (int m = 1; m + 1 < M; ++m)
        psi(m + 1) = (v * psi(m) - std::sqrt(static_cast<Real>(m)) * psi(m - 1)) / std::sqrt(static_cast<Real>(m + 1));
    return psi;
}

/// Normalized Maxwellian (2 pi)^{-1/2} exp(-v^2/2).
template <typename Real>
Real maxwellian(Real v) {
    return std::exp(-v * v / 2) / std::sqrt(2 * std::numbers::pi_v<Real>);
}

/// g_m(v) = (2 pi m!)^{-1/2} He_m(v) exp(-v^2/2), orthonormal in L^2(M1^{-1}).
template <typename Real>
RVector<Real> hermite_functions(Real v, int M) {
    return maxwellian(v) * normalized_hermite(v, M);
}

template <typename Real>
CVector<Real> synthesize(const HermiteVec<Real>& v, std::span<const Real> vgrid) {
    const int M = static_cast<int>(v.coeffs.size());
    CVector<Real> out(static_cast<Eigen::Index>(vgrid.size()));
    for (std::size_t i = 0; i < vgrid.size(); ++i) {
        if (!std::isfinite(vgrid[i])) throw UsageError("synthesize: non-finite velocity point");
        const RVector<Real> g = hermite_functions(vgrid[i], M);
        out(static_cast<Eigen::Index>(i)) = (g.template cast<std::complex<Real>>().array() * v.coeffs.array()).sum();
    }
    return out;
}

/// Gauss-Hermite rule for the weight exp(-v^2/2): integral f(v) e^{-v^2/2} dv ~ sum w_i f(v_i).
template <typename Real>
struct GaussHermiteRule {
    RVector<Real> nodes;
    RVector<Real> weights;
};

/// Golub-Welsch: nodes are the eigenvalues of the n x n streaming matrix.
template <typename Real = double>
GaussHermiteRule<Real> gauss_hermite(int n) {
    if (n < 1) throw UsageError("quadrature needs at least one node");
    Eigen::SelfAdjointEigenSolver<RMatrix<Real>> es(stream_matrix<Real>(n));
    if (es.info() != Eigen::Success) throw NumericError("Gauss-Hermite eigen-decomposition failed");
    // eigenvalues seed Newton on psi_n (psi_n' = sqrt(n) psi_{n-1}); weights from the
    // closed form sqrt(2 pi) / (n psi_{n-1}^2), accurate also at the extreme nodes
    const Real mass = std::sqrt(2 * std::numbers::pi_v<Real>);
    const Real rn = std::sqrt(static_cast<Real>(n));
    RVector<Real> x = es.eigenvalues();
    RVector<Real> w(n);
    for (int i = 0; i < n; ++i) {
        for (int it = 0; it < 3; ++it) {
            const auto psi = normalized_hermite(x(i), n + 1);
            x(i) -= psi(n) / (rn * psi(n - 1));
        }
        const Real p = normalized_hermite(x(i), n + 1)(n - 1);
        w(i) = mass / (static_cast<Real>(n) * p * p);
    }
    return {x, w};
}

/// Hermite coefficients <h, g_m> of h(v) = p(v) M1(v), for m < M.
/// Exact when p is a polynomial of degree <= 2 * nodes - M.
template <typename Real, typename Profile>
CVector<Real> project_weighted(Profile&& p, int M, int nodes) {
    const auto rule = gauss_hermite<Real>(nodes);
    const Real scale = 1 / std::sqrt(2 * std::numbers::pi_v<Real>);
    CVector<Real> c = CVector<Real>::Zero(M);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const Real v = rule.nodes(i);
        const std::complex<Real> pv = p(v);
        c += (scale * rule.weights(i) * pv) * normalized_hermite(v, M).template cast<std::complex<Real>>();
    }
    return c;
}

}  // namespace hypobgk
