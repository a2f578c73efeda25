#pragma once

#include <map>
#include <span>
#include <vector>

#include "hypobgk/state.hpp"
#include "hypobgk/uq_models.hpp"

namespace hypobgk {

/// Block lower-triangular generator of the stacked z-derivative levels of mode k:
/// block (n, n) = C_k and block (n, n - i) = binom(n, i) sigma^{(i)}(z) L2, so that
/// d/dt [h^(0); ...; h^(N)] = -G [h^(0); ...; h^(N)].
CMatrixXd augmented_generator(int k, const ModeLattice& lattice, const CollisionFrequencyModel& model, double z,
                              int depth);

/// exp(-dt G) for every stored mode at fixed (z, dt); reusable across states on the same lattice.
class StepOperator {
public:
    StepOperator(const ModeLattice& lattice, const CollisionFrequencyModel& model, double z, int depth, double dt);

    /// Applies the step in place and advances s.t by dt.
    void apply(StateStack& s) const;

    double dt() const { return dt_; }
    const CMatrixXd& mode(int k) const { return steps_[static_cast<std::size_t>(k)]; }

private:
    double dt_;
    double z_;
    int depth_;
    std::vector<CMatrixXd> steps_;
};

/// Exact propagation over dt >= 0 by the matrix exponential of the augmented generator.
StateStack evolve_exact(const StateStack& state, double dt, const CollisionFrequencyModel& model);

/// Classical fourth-order Runge-Kutta on the same right-hand side with dt / substeps.
StateStack evolve_reference(const StateStack& state, double dt, const CollisionFrequencyModel& model, int substeps);

/// Snapshots at the requested (non-decreasing) times, starting from state.t <= times[0].
std::vector<StateStack> trajectory(const StateStack& state, std::span<const double> times,
                                   const CollisionFrequencyModel& model);

}  // namespace hypobgk
