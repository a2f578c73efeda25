#pragma once

#include <vector>

#include "hypobgk/spectral.hpp"

namespace hypobgk {

/// Hermite coefficients of every stored mode k = 0..K and every z-derivative
/// level n = 0..N at one (t, z). Mode k holds its levels stacked as one
/// vector of length (N+1) * M, level n occupying [n*M, (n+1)*M).
struct StateStack {
    ModeLattice lattice;
    int levels = 1;
    std::vector<CVectorXd> modes;
    double t = 0.0;
    double z = 0.0;

    int depth() const { return levels - 1; }

    auto level(int k, int n) { return modes[static_cast<std::size_t>(k)].segment(n * lattice.M, lattice.M); }
    auto level(int k, int n) const { return modes[static_cast<std::size_t>(k)].segment(n * lattice.M, lattice.M); }
};

inline StateStack zero_stack(const ModeLattice& lattice, int depth, double z = 0.0, double t = 0.0) {
    if (depth < 0) throw UsageError("derivative depth N must be >= 0");
    StateStack s;
    s.lattice = lattice;
    s.levels = depth + 1;
    s.modes.assign(static_cast<std::size_t>(lattice.K + 1), CVectorXd::Zero(s.levels * lattice.M));
    s.t = t;
    s.z = z;
    return s;
}

}  // namespace hypobgk
