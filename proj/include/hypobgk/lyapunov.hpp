#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "hypobgk/errors.hpp"
#include "hypobgk/spectral.hpp"

namespace hypobgk {

/// sqrt(3 + sqrt 6): the largest eigenvalue of alpha^{-1} (P_1 - I).
template <typename Real = double>
Real p_spread() {
    return std::sqrt(3 + std::sqrt(Real(6)));
}

/// Upper limit placed on alpha_max so that 1 - alpha * sqrt(3 + sqrt 6) stays positive for every l.
template <typename Real = double>
Real alpha_cap() {
    return Real(0.99) / p_spread<Real>();
}

/// Relative safety factor applied to the minimized block rate.
inline constexpr double kRateSafety = 1e-6;
/// Default number of sigma grid points for the minimizations.
inline constexpr int kSigmaGrid = 10000;

/// Lyapunov transform P_k: identity except the leading 4x4 block with
/// beta = sqrt2 alpha and gamma = sqrt3 alpha.
template <typename Real>
struct TransformMatrix {
    int k = 1;
    Real alpha = 0;
    CMatrix<Real> matrix;
};

/// P with 1/k replaced by `inv_k`; inv_k = 0 gives the identity.
template <typename Real>
CMatrix<Real> transform_matrix(Real inv_k, Real alpha, int M) {
    using C = std::complex<Real>;
    CMatrix<Real> P = CMatrix<Real>::Identity(M, M);
    const std::array<Real, 3> coupling{alpha, std::sqrt(Real(2)) * alpha, std::sqrt(Real(3)) * alpha};
    for (int j = 0; j < 3; ++j) {
        P(j, j + 1) = C(0, -coupling[j] * inv_k);
        P(j + 1, j) = C(0, coupling[j] * inv_k);
    }
    return P;
}

template <typename Real>
TransformMatrix<Real> build_P(int k, Real alpha, int M) {
    if (k == 0) throw DomainError("P_k is undefined for k = 0 (the k = 0 mode uses the identity)");
    if (M < kMinTruncation) throw DomainError("Hermite truncation M must be >= 5, got " + std::to_string(M));
    if (!(alpha >= 0) || !(alpha * p_spread<Real>() < 1))
        throw CertificateError("alpha = " + std::to_string(static_cast<double>(alpha)) +
                               " outside [0, 1/sqrt(3+sqrt6))");
    return {k, alpha, transform_matrix<Real>(Real(1) / static_cast<Real>(k), alpha, M)};
}

/// Largest alpha for which the Sylvester minors of the reduced block stay positive at sigma:
/// (8 l^2 s + s^3 - sqrt(16 l^2 s^4 + s^6)) / (24 l^3), evaluated in the cancellation-free form
/// 8 s l / (3 ((8 l^2 + s^2) + s sqrt(16 l^2 + s^2))).
template <typename Real>
Real alpha_of(Real l, Real sigma) {
    if (!(l > 0)) throw DomainError("wavenumber unit l must be positive");
    if (!(sigma > 0)) throw InvalidModelError("collision frequency must be positive");
    const Real l2 = l * l;
    const Real s2 = sigma * sigma;
    return 8 * sigma * l / (3 * ((8 * l2 + s2) + sigma * std::sqrt(16 * l2 + s2)));
}

/// Result of a one-dimensional bounded minimization.
template <typename Real>
struct Minimum {
    Real arg;
    Real value;
};

/// Golden-section search for a local minimum of f on [lo, hi].
template <typename Real, typename F>
Minimum<Real> golden_section(F&& f, Real lo, Real hi, Real tol) {
    const Real invphi = (std::sqrt(Real(5)) - 1) / 2;
    Real a = lo, b = hi;
    Real c = b - invphi * (b - a);
    Real d = a + invphi * (b - a);
    Real fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const Real x = (a + b) / 2;
    return {x, f(x)};
}

/// Minimum of a continuous f over [lo, hi]: uniform grid, then golden-section
/// refinement inside the neighbouring cells of the best grid point.
template <typename Real, typename F>
Minimum<Real> grid_minimize(F&& f, Real lo, Real hi, int grid_points, Real tol = Real(1e-10)) {
    if (!(lo <= hi)) throw UsageError("grid_minimize: empty interval");
    if (lo == hi || grid_points < 2) return {lo, f(lo)};
    const Real h = (hi - lo) / static_cast<Real>(grid_points - 1);
    Minimum<Real> best{lo, f(lo)};
    int best_i = 0;
    for (int i = 1; i < grid_points; ++i) {
        const Real x = (i == grid_points - 1) ? hi : lo + h * static_cast<Real>(i);
        const Real fx = f(x);
        if (fx < best.value) {
            best = {x, fx};
            best_i = i;
        }
    }
    const Real a = std::max(lo, lo + h * static_cast<Real>(best_i - 1));
    const Real b = std::min(hi, lo + h * static_cast<Real>(best_i + 1));
    const auto refined = golden_section<Real>(f, a, b, tol);
    return refined.value < best.value ? refined : best;
}

/// min over sigma in [sigma_min, sigma_max] of alpha_of(l, sigma), capped at alpha_cap().
template <typename Real>
Real alpha_max(Real l, Real sigma_min, Real sigma_max, int grid_resolution = kSigmaGrid) {
    if (!(sigma_min > 0) || !(sigma_min <= sigma_max))
        throw InvalidModelError("need 0 < sigma_min <= sigma_max");
    const auto m = grid_minimize<Real>([l](Real s) { return alpha_of(l, s); }, sigma_min, sigma_max, grid_resolution);
    return std::min(m.value, alpha_cap<Real>());
}

/// delta_3(k, alpha, sigma) = alpha (72 l^3 alpha^2 - (48 l^2 sigma + 6 sigma^3 / k^2) alpha + 8 l sigma^2).
template <typename Real>
Real delta3(int k, Real alpha, Real sigma, Real l) {
    if (k == 0) throw DomainError("delta3 is undefined for k = 0");
    const Real k2 = static_cast<Real>(k) * static_cast<Real>(k);
    return alpha * (72 * l * l * l * alpha * alpha - (48 * l * l * sigma + 6 * sigma * sigma * sigma / k2) * alpha +
                    8 * l * sigma * sigma);
}

/// Closed forms of the lower-right j x j minors delta_1..delta_5 of the reduced block.
template <typename Real>
std::array<Real, 5> sylvester_minors(int k, Real alpha, Real sigma, Real l) {
    const Real d3 = delta3(k, alpha, sigma, l);
    return {2 * sigma, 4 * sigma * (sigma - 3 * l * alpha), d3, 2 * alpha * l * d3, 4 * alpha * alpha * l * l * d3};
}

/// Lower bound delta_3(1, alpha, sigma) / (4 (sigma - alpha l)^2) on the smallest eigenvalue
/// of C_k^* P_k + P_k C_k, valid for every k != 0.
template <typename Real>
Real rate_block(Real l, Real alpha, Real sigma) {
    if (!(sigma > 0)) throw InvalidModelError("collision frequency must be positive");
    const Real amax = alpha_of(l, sigma);
    if (!(alpha > 0) || !(alpha < amax))
        throw CertificateError("alpha = " + std::to_string(static_cast<double>(alpha)) + " outside (0, " +
                               std::to_string(static_cast<double>(amax)) + ") at sigma = " +
                               std::to_string(static_cast<double>(sigma)));
    const Real gap = sigma - alpha * l;
    return delta3(1, alpha, sigma, l) / (4 * gap * gap);
}

namespace alpha_strategy {
/// Maximize mu over (0, alpha_max).
struct Optimize {};
/// alpha = fraction * alpha_max, fraction in (0, 1).
struct Fraction {
    double value = 0.5;
};
/// alpha given explicitly; must lie in (0, alpha_max).
struct Fixed {
    double value = 0.1;
};
}  // namespace alpha_strategy

using AlphaStrategy = std::variant<alpha_strategy::Optimize, alpha_strategy::Fraction, alpha_strategy::Fixed>;

/// Decay-rate certificate for all sigma in [sigma_min, sigma_max] on a torus of length L.
template <typename Real>
struct Certificate {
    Real L = 0;
    Real l = 0;
    Real sigma_min = 0;
    Real sigma_max = 0;
    Real alpha = 0;
    Real alpha_max = 0;
    Real lambda_min = 0;  ///< worst-case block rate, safety factor applied
    Real mu = 0;          ///< C_k^* P_k + P_k C_k >= 2 mu P_k for all k != 0
    Real lambda = 0;      ///< min(mu, sigma_min)
    Real ctilde = 1;      ///< <L2 x, P L2 x> <= ctilde^2 <x, P x>
    int sigma_grid_resolution = kSigmaGrid;

    /// alpha * sqrt(3 + sqrt 6): the P_k spread, P_k in [(1 - s) I, (1 + s) I].
    Real spread() const { return alpha * p_spread<Real>(); }
};

/// lambda_min(l, alpha) over the sigma interval, before the safety factor.
template <typename Real>
Real raw_lambda_min(Real l, Real alpha, Real sigma_min, Real sigma_max, int grid_resolution) {
    return grid_minimize<Real>([&](Real s) { return rate_block(l, alpha, s); }, sigma_min, sigma_max,
                               grid_resolution)
        .value;
}

template <typename Real>
Real mu_of(Real lambda_min, Real alpha) {
    return lambda_min / (2 * (1 + alpha * p_spread<Real>()));
}

template <typename Real>
Real ctilde_of(Real alpha) {
    const Real s = alpha * p_spread<Real>();
    return std::sqrt((1 + s) / (1 - s));
}

/// Certified per-mode rate mu, global rate lambda and operator bound ctilde.
template <typename Real>
Certificate<Real> certify(Real L, Real sigma_min, Real sigma_max, const AlphaStrategy& strategy,
                          int grid_resolution = kSigmaGrid) {
    if (!(L > 0)) throw DomainError("domain length L must be positive");
    if (!(sigma_min > 0) || !(sigma_min <= sigma_max))
        throw InvalidModelError("need 0 < sigma_min <= sigma_max");
    Certificate<Real> c;
    c.L = L;
    c.l = 2 * std::numbers::pi_v<Real> / L;
    c.sigma_min = sigma_min;
    c.sigma_max = sigma_max;
    c.sigma_grid_resolution = grid_resolution;
    c.alpha_max = alpha_max(c.l, sigma_min, sigma_max, grid_resolution);

    auto mu_at = [&](Real a) { return mu_of(raw_lambda_min(c.l, a, sigma_min, sigma_max, grid_resolution), a); };

    if (std::holds_alternative<alpha_strategy::Fixed>(strategy)) {
        c.alpha = static_cast<Real>(std::get<alpha_strategy::Fixed>(strategy).value);
    } else if (std::holds_alternative<alpha_strategy::Fraction>(strategy)) {
        const Real f = static_cast<Real>(std::get<alpha_strategy::Fraction>(strategy).value);
        if (!(f > 0 && f < 1)) throw CertificateError("alpha fraction must lie in (0, 1)");
        c.alpha = f * c.alpha_max;
    } else {
        // mu vanishes at both ends of (0, alpha_max); bracket on a coarse scan, then refine.
        constexpr int scan = 64;
        Real best_a = c.alpha_max / 2;
        Real best_mu = -1;
        int best_i = 0;
        for (int i = 1; i < scan; ++i) {
            const Real a = c.alpha_max * static_cast<Real>(i) / scan;
            const Real m = mu_at(a);
            if (m > best_mu) {
                best_mu = m;
                best_a = a;
                best_i = i;
            }
        }
        const Real lo = c.alpha_max * static_cast<Real>(best_i - 1) / scan;
        const Real hi = c.alpha_max * static_cast<Real>(best_i + 1) / scan;
        const auto refined =
            golden_section<Real>([&](Real a) { return -mu_at(a); }, lo, hi, Real(1e-12) * c.alpha_max);
        c.alpha = (-refined.value > best_mu) ? refined.arg : best_a;
    }
    if (!(c.alpha > 0) || !(c.alpha < c.alpha_max))
        throw CertificateError("alpha = " + std::to_string(static_cast<double>(c.alpha)) +
                               " outside the admissible interval (0, " + std::to_string(static_cast<double>(c.alpha_max)) +
                               ")");

    // a degenerate interval is evaluated exactly; otherwise guard the grid minimum
    const Real safety = (sigma_max > sigma_min) ? 1 - Real(kRateSafety) : Real(1);
    c.lambda_min = raw_lambda_min(c.l, c.alpha, sigma_min, sigma_max, grid_resolution) * safety;
    c.mu = mu_of(c.lambda_min, c.alpha);
    c.lambda = std::min(c.mu, sigma_min);
    c.ctilde = ctilde_of(c.alpha);
    if (!(c.mu > 0)) throw NumericError("certify: non-positive rate");
    return c;
}

/// Leading 5x5 block of C_k^* P_k + P_k C_k with beta = sqrt2 alpha, gamma = sqrt3 alpha.
template <typename Real>
CMatrix<Real> build_reduced_block(int k, Real alpha, Real sigma, Real l) {
    if (k == 0) throw DomainError("reduced block is undefined for k = 0");
    using C = std::complex<Real>;
    const Real r3 = std::sqrt(Real(3));
    const Real kk = static_cast<Real>(k);
    CMatrix<Real> D = CMatrix<Real>::Zero(5, 5);
    D(0, 0) = D(1, 1) = D(2, 2) = 2 * l * alpha;
    D(3, 3) = 2 * sigma - 6 * l * alpha;
    D(4, 4) = 2 * sigma;
    D(2, 3) = C(0, -r3 * alpha * sigma / kk);
    D(3, 2) = C(0, r3 * alpha * sigma / kk);
    D(2, 4) = D(4, 2) = 2 * r3 * l * alpha;
    return D;
}

/// C_k^* P_k + P_k C_k - 2 mu P_k assembled from the full truncated matrices.
template <typename Real>
CMatrix<Real> inequality_matrix(int k, Real l, Real sigma, Real alpha, Real mu, int M) {
    const auto ops = build_operators<Real>(M);
    const CMatrix<Real> C = assemble_generator<Real>(k, l, sigma, ops);
    const CMatrix<Real> P = build_P<Real>(k, alpha, M).matrix;
    return C.adjoint() * P + P * C - 2 * mu * P;
}

/// k -> infinity limit of inequality_matrix: P_k -> I and sigma (L2 P + P L2) -> 2 sigma L2,
/// while i k l [P_k, L1] = i l [A, L1] with P_k = I + A / k does not depend on k.
template <typename Real>
CMatrix<Real> limit_inequality_matrix(Real l, Real sigma, Real alpha, Real mu, int M) {
    using C = std::complex<Real>;
    const auto ops = build_operators<Real>(M);
    const CMatrix<Real> A = transform_matrix<Real>(Real(1), alpha, M) - CMatrix<Real>::Identity(M, M);
    const CMatrix<Real> L1 = ops.stream.template cast<C>();
    const CMatrix<Real> L2 = ops.relax.template cast<C>();
    return C(0, l) * (A * L1 - L1 * A) + 2 * sigma * L2 - 2 * mu * CMatrix<Real>::Identity(M, M);
}

template <typename Real>
struct InequalityCheck {
    Real min_eigenvalue = 0;
    Real tolerance = 0;  ///< 1e-10 times the max-abs entry of the matrix
    bool confirmed = false;
};

template <typename Real>
Real min_hermitian_eigenvalue(const CMatrix<Real>& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    return es.eigenvalues()(0);
}

template <typename Real>
InequalityCheck<Real> check_hermitian_nonnegative(const CMatrix<Real>& A, Real rel_tol = Real(1e-10)) {
    InequalityCheck<Real> r;
    r.min_eigenvalue = min_hermitian_eigenvalue(A);
    r.tolerance = rel_tol * A.cwiseAbs().maxCoeff();
    r.confirmed = r.min_eigenvalue >= -r.tolerance;
    return r;
}

/// Smallest eigenvalue of C_k^* P_k + P_k C_k - 2 mu P_k for the certificate's alpha and mu.
template <typename Real>
InequalityCheck<Real> verify_inequality(int k, Real l, Real sigma, const Certificate<Real>& cert, int M) {
    if (k == 0) throw DomainError("verify_inequality is undefined for k = 0");
    return check_hermitian_nonnegative(inequality_matrix<Real>(k, l, sigma, cert.alpha, cert.mu, M));
}

}  // namespace hypobgk
