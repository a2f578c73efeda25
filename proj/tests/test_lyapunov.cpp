#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hypobgk/lyapunov.hpp"

using namespace hypobgk;
using cd = std::complex<double>;

namespace {

const double kSpread = std::sqrt(3.0 + std::sqrt(6.0));

Eigen::VectorXd sorted_eigenvalues(const CMatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<CMatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Smallest positive root of alpha -> delta3(1, alpha, sigma) / alpha by bisection.
double alpha_root_by_bisection(double l, double sigma) {
    auto q = [&](double a) { return delta3(1, a, sigma, l) / a; };
    double lo = 1e-300, hi = sigma / (3 * l);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (q(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Certificate<double> unit_certificate() {
    return certify<double>(2 * std::numbers::pi, 1.0, 1.0, alpha_strategy::Fixed{0.1});
}

}  // namespace

TEST(BuildP, ZeroAlphaIsIdentity) {
    EXPECT_EQ(build_P<double>(3, 0.0, 7).matrix, CMatrixXd::Identity(7, 7));
}

TEST(BuildP, SpectrumForUnitMode) {
    const auto P = build_P<double>(1, 0.1, 5);
    const Eigen::VectorXd ev = sorted_eigenvalues(P.matrix);
    Eigen::VectorXd expected(5);
    expected << 0.7665586, 0.9258036, 1.0, 1.0741964, 1.2334414;
    EXPECT_LT((ev - expected).cwiseAbs().maxCoeff(), 1e-7);
    const double a = 0.1 * kSpread, b = 0.1 * std::sqrt(3.0 - std::sqrt(6.0));
    Eigen::VectorXd closed(5);
    closed << 1 - a, 1 - b, 1, 1 + b, 1 + a;
    EXPECT_LT((ev - closed).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BuildP, NegativeModeIsConjugate) {
    const auto Pp = build_P<double>(1, 0.1, 6).matrix;
    const auto Pm = build_P<double>(-1, 0.1, 6).matrix;
    EXPECT_EQ(Pm, Pp.conjugate().eval());
    EXPECT_LT((sorted_eigenvalues(Pm) - sorted_eigenvalues(Pp)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildP, Errors) {
    EXPECT_THROW(build_P<double>(0, 0.1, 5), DomainError);
    EXPECT_THROW(build_P<double>(1, 1.0 / kSpread, 5), CertificateError);
    EXPECT_THROW(build_P<double>(1, -0.1, 5), CertificateError);
    EXPECT_THROW(build_P<double>(1, 0.1, 4), DomainError);
}

TEST(AlphaOf, ClosedFormValues) {
    EXPECT_NEAR(alpha_of(1.0, 1.0), (9 - std::sqrt(17.0)) / 24, 1e-15);
    EXPECT_NEAR(alpha_of(1.0, 1.0), 0.2032039, 1e-7);
    EXPECT_LT(alpha_of(1.0, 1e-9), 1e-9);
    EXPECT_GT(alpha_of(1.0, 1e-9), 0.0);
    EXPECT_NEAR(alpha_of(std::sqrt(3.0) / 4, 1.0), 4 / (9 * std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(alpha_of(std::sqrt(3.0) / 4, 1.0), 0.2566001, 1e-7);
}

TEST(AlphaOf, MaximalAtQuarterRootThreeSigma) {
    for (double sigma : {0.5, 1.0, 3.0}) {
        const double peak = alpha_of(std::sqrt(3.0) / 4 * sigma, sigma);
        for (int i = 1; i <= 400; ++i) EXPECT_LE(alpha_of(0.01 * i * sigma, sigma), peak + 1e-15);
    }
}

TEST(AlphaOf, IsSmallestRootOfDelta3) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ul(0.05, 10.0), us(0.05, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double l = ul(gen), s = us(gen);
        EXPECT_NEAR(alpha_of(l, s), alpha_root_by_bisection(l, s), 1e-12 * alpha_of(l, s) + 1e-300);
    }
}

TEST(AlphaOf, CancellationFreeAgainstLongDouble) {
    for (double l : {1e-4, 1e-2, 1.0, 50.0}) {
        const long double ref = alpha_of<long double>(l, 2.0L);
        const long double naive =
            (8.0L * l * l * 2 + 8.0L - std::sqrt(16.0L * l * l * 16 + 64.0L)) / (24.0L * l * l * l);
        EXPECT_NEAR(alpha_of(l, 2.0), static_cast<double>(ref), 1e-15 * static_cast<double>(ref));
        if (l >= 1e-2) EXPECT_NEAR(static_cast<double>(naive), static_cast<double>(ref), 1e-9 * static_cast<double>(ref));
    }
}

TEST(AlphaMax, DegenerateInterval) {
    EXPECT_EQ(alpha_max(1.0, 1.0, 1.0), std::min(alpha_of(1.0, 1.0), alpha_cap<double>()));
    EXPECT_EQ(alpha_max(0.1, 100.0, 100.0), alpha_of(0.1, 100.0));
    EXPECT_EQ(alpha_max(std::sqrt(3.0) / 4, 1.0, 1.0), alpha_of(std::sqrt(3.0) / 4, 1.0));
}

TEST(AlphaMax, MatchesGridOracle) {
    const double a = alpha_max(1.0, 1.0, 2.0);
    EXPECT_LE(a, alpha_of(1.0, 1.0));
    EXPECT_LE(a, alpha_of(1.0, 2.0));
    double oracle = 1e300;
    for (int i = 0; i < 10000; ++i) oracle = std::min(oracle, alpha_of(1.0, 1.0 + i / 9999.0));
    EXPECT_NEAR(a, oracle, 1e-12);
}

TEST(AlphaMax, AlwaysBelowPositivityLimit) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.01, 20.0);
    for (int i = 0; i < 100; ++i) {
        double s1 = u(gen), s2 = u(gen);
        if (s1 > s2) std::swap(s1, s2);
        const double a = alpha_max(u(gen), s1, s2, 200);
        EXPECT_GT(a, 0.0);
        EXPECT_LT(a * kSpread, 1.0);
    }
}

TEST(Delta3, Values) {
    EXPECT_EQ(delta3(1, 0.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(delta3(1, 0.1, 1.0, 1.0), 0.332, 1e-15);
    EXPECT_THROW(delta3(0, 0.1, 1.0, 1.0), DomainError);
}

TEST(Delta3, MonotoneInWavenumber) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.1, 5.0), f(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double l = u(gen), s = u(gen);
        const double a = f(gen) * alpha_of(l, s);
        for (int k : {-7, -1, 2, 3, 50}) EXPECT_GE(delta3(k, a, s, l), delta3(1, a, s, l));
    }
}

TEST(ReducedBlock, MatchesAssembledMatrices) {
    for (int k : {1, -2, 5}) {
        const double l = 0.8, sigma = 1.7, alpha = 0.07;
        const int M = 9;
        const CMatrixXd full = inequality_matrix<double>(k, l, sigma, alpha, 0.0, M);
        const CMatrixXd D = build_reduced_block<double>(k, alpha, sigma, l);
        EXPECT_LT((full.topLeftCorner(5, 5) - D).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((full.bottomRightCorner(M - 5, M - 5) - 2 * sigma * CMatrixXd::Identity(M - 5, M - 5))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-14);
        EXPECT_LT(full.topRightCorner(5, M - 5).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(ReducedBlock, LowerRightMinorsAreClosedFormDeterminants) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.1, 4.0), f(0.0, 1.2);
    for (int i = 0; i < 100; ++i) {
        const double l = u(gen), s = u(gen), a = f(gen) * alpha_of(l, s);
        const int k = 1 + i % 6;
        const CMatrixXd D = build_reduced_block<double>(k, a, s, l);
        const auto minors = sylvester_minors(k, a, s, l);
        for (int j = 1; j <= 5; ++j) {
            const cd det = D.bottomRightCorner(j, j).determinant();
            EXPECT_NEAR(det.real(), minors[static_cast<std::size_t>(j - 1)],
                        1e-11 * std::max(1.0, std::abs(det.real())));
            EXPECT_NEAR(det.imag(), 0.0, 1e-11 * std::max(1.0, std::abs(det.real())));
        }
    }
}

TEST(Sylvester, SignFlipsAtAlphaOf) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.1, 5.0), below(0.01, 0.999), above(1.001, 1.5);
    for (int i = 0; i < 200; ++i) {
        const double l = u(gen), s = u(gen), ab = alpha_of(l, s);
        for (double m : sylvester_minors(1, below(gen) * ab, s, l)) EXPECT_GT(m, 0.0);
        const auto bad = sylvester_minors(1, above(gen) * ab, s, l);
        EXPECT_TRUE(std::any_of(bad.begin(), bad.end(), [](double m) { return m <= 0.0; }));
    }
}

TEST(RateBlock, Values) {
    EXPECT_NEAR(rate_block(1.0, 0.1, 1.0), 0.332 / 3.24, 1e-15);
    EXPECT_NEAR(rate_block(1.0, 0.1, 1.0), 0.1024691, 1e-7);
    EXPECT_LT(rate_block(1.0, 1e-9, 1.0), 1e-8);
    EXPECT_THROW(rate_block(1.0, 0.0, 1.0), CertificateError);
    EXPECT_THROW(rate_block(1.0, 0.21, 1.0), CertificateError);
}

TEST(RateBlock, BoundedByTwoLAlpha) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.05, 8.0), f(0.001, 0.999);
    for (int i = 0; i < 2000; ++i) {
        const double l = u(gen), s = u(gen), a = f(gen) * alpha_of(l, s);
        const double r = rate_block(l, a, s);
        EXPECT_GT(r, 0.0);
        EXPECT_LE(r, 2 * l * a * (1 + 1e-14));
    }
}

TEST(RateBlock, LowerBoundsSmallestBlockEigenvalue) {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> u(0.05, 8.0), f(0.01, 0.99);
    for (int i = 0; i < 300; ++i) {
        const double l = u(gen), s = u(gen), a = f(gen) * alpha_of(l, s);
        const double ev = sorted_eigenvalues(build_reduced_block<double>(1 + i % 4, a, s, l))(0);
        EXPECT_GE(ev, rate_block(l, a, s) * (1 - 1e-12));
    }
}

TEST(Certify, UnitChain) {
    const auto c = unit_certificate();
    EXPECT_NEAR(c.l, 1.0, 1e-15);
    EXPECT_EQ(c.alpha, 0.1);
    EXPECT_NEAR(c.alpha_max, (9 - std::sqrt(17.0)) / 24, 1e-15);
    EXPECT_NEAR(c.lambda_min, 0.1024691, 1e-7);
    EXPECT_NEAR(c.lambda_min, 0.332 / 3.24, 1e-15);
    const auto wide = certify<double>(2 * std::numbers::pi, 1.0, 1.5, alpha_strategy::Fixed{0.1});
    EXPECT_NEAR(wide.lambda_min, raw_lambda_min(1.0, 0.1, 1.0, 1.5, kSigmaGrid) * (1 - kRateSafety), 1e-15);
    EXPECT_NEAR(c.mu, 0.041537901187928564, 1e-15);
    EXPECT_NEAR(c.mu, c.lambda_min / (2 * (1 + 0.1 * kSpread)), 1e-15);
    EXPECT_EQ(c.lambda, c.mu);
    EXPECT_NEAR(c.ctilde, std::sqrt((1 + 0.1 * kSpread) / (1 - 0.1 * kSpread)), 1e-15);
    EXPECT_NEAR(c.ctilde, 1.2684887, 1e-7);
}

TEST(Certify, LargeSigmaGivesLambdaEqualMu) {
    const auto c = certify<double>(2 * std::numbers::pi, 50.0, 60.0, alpha_strategy::Optimize{});
    EXPECT_EQ(c.lambda, c.mu);
    EXPECT_LT(c.mu, 2 * c.l * c.alpha);
}

TEST(Certify, InvariantsOverRandomInputs) {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> uL(0.5, 30.0), us(0.05, 10.0), uf(0.05, 0.95);
    for (int i = 0; i < 30; ++i) {
        double s1 = us(gen), s2 = us(gen);
        if (s1 > s2) std::swap(s1, s2);
        const AlphaStrategy strat = (i % 2) ? AlphaStrategy{alpha_strategy::Fraction{uf(gen)}}
                                            : AlphaStrategy{alpha_strategy::Optimize{}};
        const auto c = certify<double>(uL(gen), s1, s2, strat, 500);
        EXPECT_GT(c.alpha, 0.0);
        EXPECT_LT(c.alpha, c.alpha_max);
        EXPECT_GT(c.mu, 0.0);
        EXPECT_GT(c.lambda, 0.0);
        EXPECT_LE(c.lambda, c.mu);
        EXPECT_LE(c.lambda, c.sigma_min);
        EXPECT_GE(c.ctilde, 1.0);
    }
}

TEST(Certify, OptimizerBeatsMidpoint) {
    for (double L : {1.0, 2 * std::numbers::pi, 15.0}) {
        const auto opt = certify<double>(L, 0.5, 2.0, alpha_strategy::Optimize{});
        const auto mid = certify<double>(L, 0.5, 2.0, alpha_strategy::Fraction{0.5});
        EXPECT_GE(opt.mu, mid.mu);
    }
}

TEST(Certify, Errors) {
    EXPECT_THROW(certify<double>(1.0, 0.0, 1.0, alpha_strategy::Optimize{}), InvalidModelError);
    EXPECT_THROW(certify<double>(1.0, 2.0, 1.0, alpha_strategy::Optimize{}), InvalidModelError);
    EXPECT_THROW(certify<double>(-1.0, 1.0, 1.0, alpha_strategy::Optimize{}), DomainError);
    EXPECT_THROW(certify<double>(2 * std::numbers::pi, 1.0, 1.0, alpha_strategy::Fixed{0.3}), CertificateError);
    EXPECT_THROW(certify<double>(2 * std::numbers::pi, 1.0, 1.0, alpha_strategy::Fraction{1.0}), CertificateError);
}

TEST(VerifyInequality, UnitCertificateHoldsForManyModes) {
    const auto c = unit_certificate();
    for (int k = 1; k <= 50; ++k) {
        const auto r = verify_inequality<double>(k, 1.0, 1.0, c, 40);
        EXPECT_TRUE(r.confirmed) << "k=" << k << " min ev " << r.min_eigenvalue;
        EXPECT_TRUE(verify_inequality<double>(-k, 1.0, 1.0, c, 40).confirmed);
    }
}

TEST(VerifyInequality, TenfoldRateFails) {
    auto c = unit_certificate();
    c.mu *= 10;
    bool any_fail = false;
    for (int k = 1; k <= 50; ++k) any_fail |= !verify_inequality<double>(k, 1.0, 1.0, c, 40).confirmed;
    EXPECT_TRUE(any_fail);
}

TEST(VerifyInequality, ZeroAlphaFails) {
    Certificate<double> c;
    c.alpha = 0.0;
    c.mu = 1e-3;
    const auto r = verify_inequality<double>(1, 1.0, 1.0, c, 10);
    EXPECT_FALSE(r.confirmed);
    EXPECT_NEAR(r.min_eigenvalue, -2e-3, 1e-12);
    EXPECT_THROW(verify_inequality<double>(0, 1.0, 1.0, c, 10), DomainError);
}

TEST(Properties, PMinEigenvalueClosedForm) {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.0, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double a = u(gen) / kSpread;
        const int k = 1 + i % 20;
        const auto ev = sorted_eigenvalues(build_P<double>((i % 3 == 0) ? -k : k, a, 5 + i % 10).matrix);
        EXPECT_NEAR(ev(0), 1 - a * kSpread / k, 1e-12);
        EXPECT_GE(ev(0), 1 - a * kSpread - 1e-14);
        EXPECT_LE(ev(ev.size() - 1), 1 + a * kSpread + 1e-14);
    }
}

TEST(Properties, TruncationCannotBreakCertificate) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> uL(1.0, 20.0), us(0.2, 5.0);
    for (int trial = 0; trial < 3; ++trial) {
        double s1 = us(gen), s2 = us(gen);
        if (s1 > s2) std::swap(s1, s2);
        const auto c = certify<double>(uL(gen), s1, s2, alpha_strategy::Optimize{}, 1000);
        for (int M : {5, 10, 20, 40})
            for (double s : {s1, 0.5 * (s1 + s2), s2})
                for (int k : {1, 2, 3, 10, 49}) EXPECT_TRUE(verify_inequality<double>(k, c.l, s, c, M).confirmed);
    }
}

TEST(Properties, LargeWavenumberLimitPasses) {
    const auto c = certify<double>(3.0, 0.4, 2.5, alpha_strategy::Optimize{}, 1000);
    for (double s : {0.4, 1.0, 2.5}) {
        const CMatrixXd lim = limit_inequality_matrix<double>(c.l, s, c.alpha, c.mu, 20);
        EXPECT_TRUE(check_hermitian_nonnegative<double>(lim).confirmed);
        const CMatrixXd far = inequality_matrix<double>(1000000, c.l, s, c.alpha, c.mu, 20);
        EXPECT_LT((far - lim).cwiseAbs().maxCoeff(), 1e-5);
        double ev_min_small_k = 1e300;
        for (int k = 1; k <= 3; ++k) ev_min_small_k = std::min(ev_min_small_k, verify_inequality<double>(k, c.l, s, c, 20).min_eigenvalue);
        double ev_min_large_k = 1e300;
        for (int k = 20; k <= 50; ++k) ev_min_large_k = std::min(ev_min_large_k, verify_inequality<double>(k, c.l, s, c, 20).min_eigenvalue);
        EXPECT_LE(ev_min_small_k, ev_min_large_k + 1e-12);
    }
}

TEST(Templates, LongDoubleChainAgrees) {
    const auto cl = certify<long double>(2 * std::numbers::pi_v<long double>, 1.0L, 1.0L, alpha_strategy::Fixed{0.1});
    const auto c = unit_certificate();
    EXPECT_NEAR(static_cast<double>(cl.mu), c.mu, 1e-15);
    EXPECT_NEAR(static_cast<double>(cl.lambda_min), c.lambda_min, 1e-15);
}
