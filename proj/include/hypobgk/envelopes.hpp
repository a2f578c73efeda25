#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "hypobgk/errors.hpp"

namespace hypobgk {

template <typename Real>
Real binomial_coefficient(int n, int i) {
    Real r = 1;
    for (int j = 1; j <= i; ++j) r = r * static_cast<Real>(n - i + j) / static_cast<Real>(j);
    return r;
}

template <typename Real>
Real factorial(int n) {
    Real r = 1;
    for (int j = 2; j <= n; ++j) r *= static_cast<Real>(j);
    return r;
}

/// Entropy decay envelope e^{-2 lambda t} E0.
template <typename Real>
Real envelope_entropy(Real E0, Real lambda, Real t) {
    return std::exp(-2 * lambda * t) * E0;
}

/// Gronwall sum e^{-lambda t} sum_i binom(n, i) (C t)^i f_{n-i}(0); f_init[j] is level j.
template <typename Real>
Real gronwall_sum(int n, Real t, Real lambda, Real C, std::span<const Real> f_init) {
    if (n < 0) throw UsageError("level n must be >= 0");
    if (static_cast<int>(f_init.size()) < n + 1) throw UsageError("need initial values for levels 0..n");
    Real sum = 0;
    Real ct_pow = 1;
    for (int i = 0; i <= n; ++i) {
        sum += binomial_coefficient<Real>(n, i) * ct_pow * f_init[static_cast<std::size_t>(n - i)];
        ct_pow *= C * t;
    }
    return std::exp(-lambda * t) * sum;
}

/// Bound on sqrt(E(d^n h / dz^n))(t) for sigma affine in z with ctilde = |c1| * Ctilde;
/// sqrtE_init[j] is sqrt(E) of level j at t = 0.
template <typename Real>
Real envelope_affine(int n, Real t, Real lambda, Real ctilde, std::span<const Real> sqrtE_init) {
    return gronwall_sum<Real>(n, t, lambda, ctilde, sqrtE_init);
}

/// Simplified form e^{-lambda t} (H + ctilde t)^n, valid when E(level j)(0) <= H^{2j} for all j.
template <typename Real>
Real envelope_affine_collapsed(int n, Real t, Real lambda, Real ctilde, Real H) {
    if (n < 0) throw UsageError("level n must be >= 0");
    return std::exp(-lambda * t) * std::pow(H + ctilde * t, n);
}

/// Exact-sum and relaxed forms of the eta-chain bound
///   H^n/n! + (1+H)^{n+1} sum_{k=1}^n (Ct)^k/(k!(k-1)!) (n-1)!/(n-k)!
///   H^n/n! + (1+H)^{n+1} min{(1 + C t)^n, e^{C t} 2^{n-1}}.
/// For n = 0 both are defined as 1.
template <typename Real>
std::pair<Real, Real> gronwall_eta(int n, Real t, Real C, Real H) {
    if (n < 0) throw UsageError("level n must be >= 0");
    if (n == 0) return {Real(1), Real(1)};
    const Real base = std::pow(H, n) / factorial<Real>(n);
    const Real growth = std::pow(1 + H, n + 1);
    Real sum = 0;
    for (int k = 1; k <= n; ++k) {
        // (n-1)!/(n-k)! as a falling product
        Real falling = 1;
        for (int j = n - k + 1; j <= n - 1; ++j) falling *= static_cast<Real>(j);
        sum += std::pow(C * t, k) / (factorial<Real>(k) * factorial<Real>(k - 1)) * falling;
    }
    const Real relaxed = std::min(std::pow(1 + C * t, n), std::exp(C * t) * std::pow(Real(2), n - 1));
    return {base + growth * sum, base + growth * relaxed};
}

/// Bound on sqrt(E(d^n h / dz^n))(t) for sigma with |sigma^{(n)}/n!| < C, chat = Ctilde * C and
/// E(level j)(0) <= H^{2j}:
///   e^{-lambda t} H^n + n! (1+H)^{n+1} min{e^{-lambda t} (1 + chat t)^n, e^{(chat - lambda) t} 2^{n-1}}.
/// Level 0 reduces to e^{-lambda t} (the hypothesis there reads E(h)(0) <= 1).
template <typename Real>
Real envelope_taylor(int n, Real t, Real lambda, Real chat, Real H) {
    if (n < 0) throw UsageError("level n must be >= 0");
    if (n == 0) return std::exp(-lambda * t);
    const Real decay = std::exp(-lambda * t);
    const Real branch =
        std::min(decay * std::pow(1 + chat * t, n), std::exp((chat - lambda) * t) * std::pow(Real(2), n - 1));
    return decay * std::pow(H, n) + factorial<Real>(n) * std::pow(1 + H, n + 1) * branch;
}

/// Bound on eta^(n)(t) = e^{lambda t} ||h^(n)(t) / n!||_F from the relaxed eta-chain estimate.
template <typename Real>
Real eta_bound(int n, Real t, Real chat, Real H) {
    if (n == 0) return Real(1);
    return gronwall_eta<Real>(n, t, chat, H).second;
}

}  // namespace hypobgk
