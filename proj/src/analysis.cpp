#include "hypobgk/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace hypobgk {

double mode_entropy(const Eigen::Ref<const CVectorXd>& h, int k, double alpha) {
    if (k == 0 || alpha == 0.0) return h.squaredNorm();
    const auto P = build_P<double>(k, alpha, static_cast<int>(h.size()));
    return h.dot(P.matrix * h).real();
}

EntropyValue entropy(const StateStack& stack, int level, double alpha) {
    if (level < 0 || level >= stack.levels) throw UsageError("entropy: level outside the stack");
    double e = mode_entropy(stack.level(0, level), 0, alpha);
    for (int k = 1; k <= stack.lattice.K; ++k) e += 2.0 * mode_entropy(stack.level(k, level), k, alpha);
    return {e, level, stack.t, stack.z};
}

EntropyValue entropy(const StateStack& stack, int level, const Certificate<double>& cert) {
    return entropy(stack, level, cert.alpha);
}

double mode_entropy_rate(const Eigen::Ref<const CVectorXd>& h, int k, double l, double sigma, double alpha) {
    const int M = static_cast<int>(h.size());
    const auto ops = build_operators<double>(M);
    const CMatrixXd C = assemble_generator<double>(k, l, sigma, ops);
    const CMatrixXd P = (k == 0) ? CMatrixXd::Identity(M, M) : build_P<double>(k, alpha, M).matrix;
    return -h.dot((C.adjoint() * P + P * C) * h).real();
}

bool DecayReport::pass() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelSeries& s) { return s.pass; });
}

double DecayReport::max_ratio() const {
    double r = 0.0;
    for (const auto& s : levels) r = std::max(r, s.max_ratio);
    return r;
}

LevelSeries check_envelope(int level, std::span<const double> observed, std::span<const double> envelope, double tol) {
    if (observed.size() != envelope.size()) throw UsageError("check_envelope: series lengths differ");
    LevelSeries s;
    s.level = level;
    s.observed.assign(observed.begin(), observed.end());
    s.envelope.assign(envelope.begin(), envelope.end());
    s.ratio.resize(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double r;
        if (observed[i] == 0.0)
            r = 0.0;
        else if (envelope[i] > 0.0)
            r = observed[i] / envelope[i];
        else
            r = std::numeric_limits<double>::infinity();
        s.ratio[i] = r;
        s.max_ratio = std::max(s.max_ratio, r);
    }
    s.pass = s.max_ratio <= 1.0 + tol;
    return s;
}

std::vector<std::vector<double>> entropy_series(std::span<const StateStack> snapshots, double alpha) {
    if (snapshots.empty()) return {};
    const int levels = snapshots.front().levels;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(levels));
    for (int n = 0; n < levels; ++n)
        for (const auto& s : snapshots) out[static_cast<std::size_t>(n)].push_back(entropy(s, n, alpha).value);
    return out;
}

namespace {

DecayReport make_report(std::string bound, std::span<const StateStack> snapshots) {
    if (snapshots.empty()) throw UsageError("envelope check needs at least one snapshot");
    DecayReport r;
    r.bound = std::move(bound);
    r.z = snapshots.front().z;
    for (const auto& s : snapshots) r.times.push_back(s.t - snapshots.front().t);
    return r;
}

std::vector<double> sqrt_all(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::sqrt(std::max(x, 0.0)); });
    return out;
}

}  // namespace

DecayReport check_entropy_decay(std::span<const StateStack> snapshots, const Certificate<double>& cert, double tol) {
    DecayReport r = make_report("entropy", snapshots);
    const auto E = entropy_series(snapshots, cert.alpha);
    std::vector<double> env(r.times.size());
    for (std::size_t i = 0; i < env.size(); ++i) env[i] = envelope_entropy(E[0][0], cert.lambda, r.times[i]);
    r.levels.push_back(check_envelope(0, E[0], env, tol));
    return r;
}

DecayReport check_affine(std::span<const StateStack> snapshots, const Certificate<double>& cert, double ctilde,
                         double tol) {
    DecayReport r = make_report("affine", snapshots);
    const auto E = entropy_series(snapshots, cert.alpha);
    std::vector<double> init;
    for (const auto& level : E) init.push_back(std::sqrt(std::max(level[0], 0.0)));
    for (std::size_t n = 0; n < E.size(); ++n) {
        std::vector<double> env(r.times.size());
        for (std::size_t i = 0; i < env.size(); ++i)
            env[i] = envelope_affine<double>(static_cast<int>(n), r.times[i], cert.lambda, ctilde, init);
        r.levels.push_back(check_envelope(static_cast<int>(n), sqrt_all(E[n]), env, tol));
    }
    return r;
}

DecayReport check_affine_collapsed(std::span<const StateStack> snapshots, const Certificate<double>& cert,
                                   double ctilde, double H, double tol) {
    DecayReport r = make_report("affine_collapsed", snapshots);
    const auto E = entropy_series(snapshots, cert.alpha);
    for (std::size_t n = 0; n < E.size(); ++n) {
        std::vector<double> env(r.times.size());
        for (std::size_t i = 0; i < env.size(); ++i)
            env[i] = envelope_affine_collapsed<double>(static_cast<int>(n), r.times[i], cert.lambda, ctilde, H);
        r.levels.push_back(check_envelope(static_cast<int>(n), sqrt_all(E[n]), env, tol));
    }
    return r;
}

DecayReport check_taylor(std::span<const StateStack> snapshots, const Certificate<double>& cert, double chat,
                         double H, double tol) {
    DecayReport r = make_report("taylor", snapshots);
    const auto E = entropy_series(snapshots, cert.alpha);
    for (std::size_t n = 0; n < E.size(); ++n) {
        std::vector<double> env(r.times.size());
        for (std::size_t i = 0; i < env.size(); ++i)
            env[i] = envelope_taylor<double>(static_cast<int>(n), r.times[i], cert.lambda, chat, H);
        r.levels.push_back(check_envelope(static_cast<int>(n), sqrt_all(E[n]), env, tol));
    }
    return r;
}

double hypothesis_H(const StateStack& initial, double alpha) {
    const double e0 = entropy(initial, 0, alpha).value;
    if (e0 > 1.0 + 1e-12)
        throw DataError("level-0 entropy " + std::to_string(e0) + " exceeds 1; scale the initial data first");
    double H = 0.0;
    for (int n = 1; n < initial.levels; ++n) {
        const double e = entropy(initial, n, alpha).value;
        H = std::max(H, std::pow(std::max(e, 0.0), 1.0 / (2.0 * n)));
    }
    return H + 1e-9;
}

StateStack normalize_for_hypothesis(const StateStack& initial, double alpha) {
    const double e0 = entropy(initial, 0, alpha).value;
    StateStack out = initial;
    if (e0 > 1.0) {
        const double s = 1.0 / std::sqrt(e0);
        for (auto& m : out.modes) m *= s;
    }
    return out;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size() || times.size() < 2) throw UsageError("fit_decay_rate needs >= 2 samples");
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(values[i] > 0.0)) throw NumericError("fit_decay_rate: non-positive sample");
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
    }
    return -(n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace hypobgk
