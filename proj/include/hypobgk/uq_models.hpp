#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypobgk/state.hpp"

namespace hypobgk {

namespace sigma_law {
struct Constant {
    double sigma0 = 1.0;
};
/// sigma0 + c1 z
struct Affine {
    double sigma0 = 1.0;
    double c1 = 0.0;
};
/// sigma0 + amplitude * sin(frequency * z)
struct Trigonometric {
    double sigma0 = 1.0;
    double amplitude = 0.0;
    double frequency = 1.0;
};
/// sum_j coeffs[j] z^j
struct Polynomial {
    std::vector<double> coeffs;
};
}  // namespace sigma_law

using SigmaLaw = std::variant<sigma_law::Constant, sigma_law::Affine, sigma_law::Trigonometric, sigma_law::Polynomial>;

struct ZInterval {
    double lo = -1.0;
    double hi = 1.0;
};

/// Collision frequency sigma(z) on a closed z-interval.
struct CollisionFrequencyModel {
    SigmaLaw law;
    ZInterval domain;
};

/// Relative margin making the Taylor bound strict.
inline constexpr double kTaylorMargin = 1e-9;

std::string describe(const CollisionFrequencyModel& model);

/// Exact n-th z-derivative of sigma at z.
double sigma_eval(const CollisionFrequencyModel& model, double z, int n = 0);

/// (sigma_min, sigma_max) over the domain; InvalidModelError when sigma_min <= 0.
std::pair<double, double> sigma_bounds(const CollisionFrequencyModel& model);

/// C with |sigma^{(n)}(z) / n!| < C for every n >= 0 and z in the domain.
double taylor_bound(const CollisionFrequencyModel& model);

/// Validates the domain and positivity; returns the model unchanged.
CollisionFrequencyModel make_model(SigmaLaw law, ZInterval domain);

/// Uniform grid of `count` points over the model's z-domain (midpoint when count == 1).
std::vector<double> z_grid(const ZInterval& domain, int count);

// ---------------------------------------------------------------------------
// initial data

enum class NormalizationMode { Enforce, Reject };

/// One Hermite-Fourier coefficient of derivative level `level`.
struct CoefficientEntry {
    int k = 0;
    int m = 0;
    int level = 0;
    std::complex<double> value;
};

/// Contribution fourier * exp(i k l x) * poly(v) * M1(v) to derivative level `level`.
struct ProfileTerm {
    int k = 0;
    std::complex<double> fourier{1.0, 0.0};
    std::vector<double> poly;
    int level = 0;
};

/// Seeded random coefficients, uniform in [-amplitude, amplitude] (real and imaginary parts).
struct RandomData {
    std::uint64_t seed = 0;
    double amplitude = 1.0;
    bool random_levels = false;  ///< levels n >= 1 random as well, otherwise zero
};

struct InitialDataSpec {
    std::variant<std::vector<CoefficientEntry>, std::vector<ProfileTerm>, RandomData> source;
    NormalizationMode normalization = NormalizationMode::Enforce;
};

/// Tolerance on the k = 0 moments in reject mode.
inline constexpr double kNormalizationTol = 1e-10;

/// Hermite-Fourier coefficients of the initial datum on the lattice, levels 0..depth.
/// The k = 0 mass, momentum and energy modes of every level are zeroed (Enforce)
/// or checked (Reject).
StateStack project_initial(const InitialDataSpec& spec, const ModeLattice& lattice, int depth = 0, double z = 0.0);

}  // namespace hypobgk
