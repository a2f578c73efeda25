#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypobgk/envelopes.hpp"
#include "hypobgk/lyapunov.hpp"
#include "hypobgk/state.hpp"

namespace hypobgk {

struct EntropyValue {
    double value = 0.0;
    int level = 0;
    double t = 0.0;
    double z = 0.0;
};

/// <h, P_k h> for one mode (P_0 = I); real by Hermiticity.
double mode_entropy(const Eigen::Ref<const CVectorXd>& h, int k, double alpha);

/// E(level n) = <h_0, h_0> + 2 sum_{k=1..K} <h_k, P_k h_k>.
EntropyValue entropy(const StateStack& stack, int level, double alpha);
EntropyValue entropy(const StateStack& stack, int level, const Certificate<double>& cert);

/// d/dt <h_k, P_k h_k> along d/dt h_k = -C_k h_k, i.e. -<h_k, (C_k^* P_k + P_k C_k) h_k>.
double mode_entropy_rate(const Eigen::Ref<const CVectorXd>& h, int k, double l, double sigma, double alpha);

/// One level's observed series against its envelope.
struct LevelSeries {
    int level = 0;
    std::vector<double> observed;
    std::vector<double> envelope;
    std::vector<double> ratio;
    double max_ratio = 0.0;
    bool pass = true;
};

struct DecayReport {
    std::string bound;
    double z = 0.0;
    std::vector<double> times;
    std::vector<LevelSeries> levels;

    bool pass() const;
    double max_ratio() const;
};

/// Relative slack allowed above a proven envelope.
inline constexpr double kEnvelopeTol = 1e-8;

/// ratio = observed / envelope (0 when both vanish); pass iff every ratio <= 1 + tol.
LevelSeries check_envelope(int level, std::span<const double> observed, std::span<const double> envelope,
                           double tol = kEnvelopeTol);

/// Entropy series of every level over a trajectory.
std::vector<std::vector<double>> entropy_series(std::span<const StateStack> snapshots, double alpha);

/// Entropy decay check: E(t) <= e^{-2 lambda t} E(0) at level 0.
DecayReport check_entropy_decay(std::span<const StateStack> snapshots, const Certificate<double>& cert,
                           double tol = kEnvelopeTol);

/// sqrt(E(level n)) against the Gronwall-sum envelope, levels 0..N (sigma affine, ctilde = |c1| Ctilde).
DecayReport check_affine(std::span<const StateStack> snapshots, const Certificate<double>& cert, double ctilde,
                           double tol = kEnvelopeTol);

/// sqrt(E(level n)) against e^{-lambda t} (H + ctilde t)^n; requires E(level n)(0) <= H^{2n}.
DecayReport check_affine_collapsed(std::span<const StateStack> snapshots, const Certificate<double>& cert,
                                     double ctilde, double H, double tol = kEnvelopeTol);

/// sqrt(E(level n)) against the general Taylor-bounded envelope with chat = Ctilde * C.
DecayReport check_taylor(std::span<const StateStack> snapshots, const Certificate<double>& cert, double chat,
                           double H, double tol = kEnvelopeTol);

/// Smallest H with E(level n)(0) <= H^{2n} for n >= 1, rounded up by 1e-9.
/// Throws DataError when E(level 0)(0) > 1 (see normalize_for_hypothesis).
double hypothesis_H(const StateStack& initial, double alpha);

/// Scales every level by 1 / sqrt(E(level 0)) when E(level 0) > 1 so that the level-0 hypothesis holds.
StateStack normalize_for_hypothesis(const StateStack& initial, double alpha);

/// Least-squares slope r of log(values) = a - r t.
double fit_decay_rate(std::span<const double> times, std::span<const double> values);

}  // namespace hypobgk
