#include "hypobgk/propagator.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace hypobgk {
namespace {

double binomial(int n, int i) {
    double r = 1.0;
    for (int j = 1; j <= i; ++j) r = r * static_cast<double>(n - i + j) / static_cast<double>(j);
    return r;
}

void require_compatible(const StateStack& s) {
    if (static_cast<int>(s.modes.size()) != s.lattice.K + 1) throw UsageError("state has wrong number of modes");
    for (const auto& m : s.modes)
        if (m.size() != s.levels * s.lattice.M) throw UsageError("state mode has wrong length");
}

}  // namespace

CMatrixXd augmented_generator(int k, const ModeLattice& lattice, const CollisionFrequencyModel& model, double z,
                              int depth) {
    const int M = lattice.M;
    const auto ops = build_operators<double>(M);
    const double sigma = sigma_eval(model, z, 0);
    const CMatrixXd Ck = assemble_generator<double>(k, lattice.l, sigma, ops);
    const CMatrixXd L2 = ops.relax.cast<std::complex<double>>();

    CMatrixXd G = CMatrixXd::Zero((depth + 1) * M, (depth + 1) * M);
    for (int n = 0; n <= depth; ++n) {
        G.block(n * M, n * M, M, M) = Ck;
        for (int i = 1; i <= n; ++i) {
            const double coupling = binomial(n, i) * sigma_eval(model, z, i);
            if (coupling != 0.0) G.block(n * M, (n - i) * M, M, M) = coupling * L2;
        }
    }
    return G;
}

StepOperator::StepOperator(const ModeLattice& lattice, const CollisionFrequencyModel& model, double z, int depth,
                           double dt)
    : dt_(dt), z_(z), depth_(depth) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw UsageError("time step must be finite and >= 0");
    steps_.reserve(static_cast<std::size_t>(lattice.K + 1));
    for (int k = 0; k <= lattice.K; ++k) {
        const CMatrixXd G = augmented_generator(k, lattice, model, z, depth);
        if (dt == 0.0) {
            steps_.push_back(CMatrixXd::Identity(G.rows(), G.cols()));
            continue;
        }
        CMatrixXd E = (-dt * G).exp();
        if (!E.allFinite())
            throw NumericError("matrix exponential did not converge for mode k = " + std::to_string(k));
        steps_.push_back(std::move(E));
    }
}

void StepOperator::apply(StateStack& s) const {
    require_compatible(s);
    if (s.levels != depth_ + 1 || static_cast<std::size_t>(s.lattice.K + 1) != steps_.size())
        throw UsageError("step operator built for a different lattice or depth");
    if (s.z != z_) throw UsageError("step operator built for a different z");
    for (std::size_t k = 0; k < steps_.size(); ++k) s.modes[k] = steps_[k] * s.modes[k];
    s.t += dt_;
}

StateStack evolve_exact(const StateStack& state, double dt, const CollisionFrequencyModel& model) {
    require_compatible(state);
    StateStack out = state;
    StepOperator(state.lattice, model, state.z, state.depth(), dt).apply(out);
    return out;
}

StateStack evolve_reference(const StateStack& state, double dt, const CollisionFrequencyModel& model, int substeps) {
    require_compatible(state);
    if (substeps < 1) throw UsageError("substeps must be >= 1");
    StateStack out = state;
    const double h = dt / substeps;
    for (int k = 0; k <= state.lattice.K; ++k) {
        const CMatrixXd G = augmented_generator(k, state.lattice, model, state.z, state.depth());
        CVectorXd y = state.modes[static_cast<std::size_t>(k)];
        for (int s = 0; s < substeps; ++s) {
            const CVectorXd k1 = -G * y;
            const CVectorXd k2 = -G * (y + 0.5 * h * k1);
            const CVectorXd k3 = -G * (y + 0.5 * h * k2);
            const CVectorXd k4 = -G * (y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.modes[static_cast<std::size_t>(k)] = y;
    }
    out.t += dt;
    return out;
}

std::vector<StateStack> trajectory(const StateStack& state, std::span<const double> times,
                                   const CollisionFrequencyModel& model) {
    if (times.empty()) return {};
    if (times.front() < state.t) throw UsageError("trajectory times must start at or after the state time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1]) throw UsageError("trajectory times must be sorted");

    std::vector<StateStack> out;
    out.reserve(times.size());
    StateStack cur = state;
    // uniform grids reuse one exponential
    std::map<double, StepOperator> cache;
    auto step = [&](double dt) {
        auto it = cache.find(dt);
        if (it == cache.end())
            it = cache.emplace(dt, StepOperator(cur.lattice, model, cur.z, cur.depth(), dt)).first;
        it->second.apply(cur);
    };
    for (double t : times) {
        const double dt = t - cur.t;
        if (dt > 0.0) step(dt);
        cur.t = t;
        out.push_back(cur);
    }
    return out;
}

}  // namespace hypobgk
