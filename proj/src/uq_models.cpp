#include "hypobgk/uq_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hypobgk/lyapunov.hpp"

namespace hypobgk {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double falling_factorial(int j, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= static_cast<double>(j - i);
    return r;
}

double binomial(int j, int n) {
    double r = 1.0;
    for (int i = 1; i <= n; ++i) r = r * static_cast<double>(j - n + i) / static_cast<double>(i);
    return r;
}

double polynomial_derivative(const std::vector<double>& a, double z, int n) {
    const int deg = static_cast<int>(a.size()) - 1;
    if (n > deg) return 0.0;
    double acc = 0.0;
    for (int j = deg; j >= n; --j) acc = acc * z + a[static_cast<std::size_t>(j)] * falling_factorial(j, n);
    return acc;
}

double trig_derivative(const sigma_law::Trigonometric& t, double z, int n) {
    const double x = t.frequency * z;
    const double scale = t.amplitude * std::pow(t.frequency, n);
    switch (n % 4) {
        case 0: return scale * std::sin(x);
        case 1: return scale * std::cos(x);
        case 2: return -scale * std::sin(x);
        default: return -scale * std::cos(x);
    }
}

std::pair<double, double> trig_bounds(const sigma_law::Trigonometric& t, const ZInterval& d) {
    auto f = [&](double z) { return t.sigma0 + t.amplitude * std::sin(t.frequency * z); };
    double lo = std::min(f(d.lo), f(d.hi));
    double hi = std::max(f(d.lo), f(d.hi));
    if (t.frequency != 0.0 && t.amplitude != 0.0) {
        // interior extrema at frequency * z = pi/2 + j pi
        const double w = std::abs(t.frequency);
        const double xlo = w * (t.frequency > 0 ? d.lo : -d.hi);
        const double xhi = w * (t.frequency > 0 ? d.hi : -d.lo);
        const double first = std::ceil((xlo - std::numbers::pi / 2) / std::numbers::pi);
        for (double j = first; std::numbers::pi / 2 + j * std::numbers::pi <= xhi; j += 1.0) {
            const double peak = (std::fmod(std::abs(j), 2.0) == 0.0) ? 1.0 : -1.0;
            const double v = t.sigma0 + t.amplitude * peak;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (hi - lo >= 2.0 * std::abs(t.amplitude)) break;
        }
    }
    return {lo, hi};
}

std::pair<double, double> polynomial_bounds(const sigma_law::Polynomial& p, const ZInterval& d) {
    auto f = [&](double z) { return polynomial_derivative(p.coeffs, z, 0); };
    const auto mn = grid_minimize<double>(f, d.lo, d.hi, kSigmaGrid);
    const auto mx = grid_minimize<double>([&](double z) { return -f(z); }, d.lo, d.hi, kSigmaGrid);
    // refinement error is far below this pad
    const double pad = 1e-12 * std::max(std::abs(mn.value), std::abs(mx.value));
    return {mn.value - pad, -mx.value + pad};
}

}  // namespace

std::string describe(const CollisionFrequencyModel& model) {
    std::ostringstream os;
    os.precision(12);
    std::visit(overloaded{
                   [&](const sigma_law::Constant& c) { os << "constant sigma = " << c.sigma0; },
                   [&](const sigma_law::Affine& a) { os << "affine sigma = " << a.sigma0 << " + " << a.c1 << " z"; },
                   [&](const sigma_law::Trigonometric& t) {
                       os << "trigonometric sigma = " << t.sigma0 << " + " << t.amplitude << " sin(" << t.frequency
                          << " z)";
                   },
                   [&](const sigma_law::Polynomial& p) {
                       os << "polynomial sigma =";
                       for (std::size_t j = 0; j < p.coeffs.size(); ++j) os << (j ? " + " : " ") << p.coeffs[j] << " z^" << j;
                   },
               },
               model.law);
    os << " on z in [" << model.domain.lo << ", " << model.domain.hi << "]";
    return os.str();
}

double sigma_eval(const CollisionFrequencyModel& model, double z, int n) {
    if (n < 0) throw UsageError("derivative order must be >= 0");
    if (!(z >= model.domain.lo && z <= model.domain.hi))
        throw DomainError("z = " + std::to_string(z) + " outside the model domain [" + std::to_string(model.domain.lo) +
                          ", " + std::to_string(model.domain.hi) + "]");
    return std::visit(overloaded{
                          [&](const sigma_law::Constant& c) { return n == 0 ? c.sigma0 : 0.0; },
                          [&](const sigma_law::Affine& a) {
                              return n == 0 ? a.sigma0 + a.c1 * z : (n == 1 ? a.c1 : 0.0);
                          },
                          [&](const sigma_law::Trigonometric& t) {
                              return (n == 0 ? t.sigma0 : 0.0) + trig_derivative(t, z, n);
                          },
                          [&](const sigma_law::Polynomial& p) { return polynomial_derivative(p.coeffs, z, n); },
                      },
                      model.law);
}

std::pair<double, double> sigma_bounds(const CollisionFrequencyModel& model) {
    const ZInterval& d = model.domain;
    if (!(d.lo <= d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi))
        throw InvalidModelError("invalid z-domain for " + describe(model));
    const auto bounds = std::visit(overloaded{
                                       [&](const sigma_law::Constant& c) { return std::pair{c.sigma0, c.sigma0}; },
                                       [&](const sigma_law::Affine& a) {
                                           const double x = a.sigma0 + a.c1 * d.lo, y = a.sigma0 + a.c1 * d.hi;
                                           return std::pair{std::min(x, y), std::max(x, y)};
                                       },
                                       [&](const sigma_law::Trigonometric& t) { return trig_bounds(t, d); },
                                       [&](const sigma_law::Polynomial& p) { return polynomial_bounds(p, d); },
                                   },
                                   model.law);
    if (!(bounds.first > 0.0) || !std::isfinite(bounds.second))
        throw InvalidModelError("sigma_min = " + std::to_string(bounds.first) + " <= 0 for " + describe(model));
    return bounds;
}

double taylor_bound(const CollisionFrequencyModel& model) {
    const auto [smin, smax] = sigma_bounds(model);
    const double raw = std::visit(
        overloaded{
            [&](const sigma_law::Constant&) { return smax; },
            [&](const sigma_law::Affine& a) { return std::max(smax, std::abs(a.c1)); },
            [&](const sigma_law::Trigonometric& t) {
                if (std::abs(t.frequency) > 1.0)
                    throw NotCertifiableError("Taylor bound needs |frequency| <= 1 for " + describe(model) +
                                              "; lower the frequency or use an affine model");
                // |sigma^(n)/n!| <= |amplitude| |w|^n / n! <= |amplitude| for n >= 1
                return std::max(smax, std::abs(t.amplitude));
            },
            [&](const sigma_law::Polynomial& p) {
                const double R = std::max(std::abs(model.domain.lo), std::abs(model.domain.hi));
                const int deg = static_cast<int>(p.coeffs.size()) - 1;
                double c = smax;
                for (int n = 1; n <= deg; ++n) {
                    double s = 0.0;
                    for (int j = n; j <= deg; ++j) s += std::abs(p.coeffs[static_cast<std::size_t>(j)]) * binomial(j, n) * std::pow(R, j - n);
                    c = std::max(c, s);
                }
                return c;
            },
        },
        model.law);
    return raw * (1.0 + kTaylorMargin);
}

CollisionFrequencyModel make_model(SigmaLaw law, ZInterval domain) {
    CollisionFrequencyModel m{std::move(law), domain};
    if (const auto* p = std::get_if<sigma_law::Polynomial>(&m.law); p && p->coeffs.empty())
        throw InvalidModelError("polynomial model needs at least one coefficient");
    sigma_bounds(m);
    return m;
}

std::vector<double> z_grid(const ZInterval& domain, int count) {
    if (count < 1) throw UsageError("z-grid needs at least one point");
    if (count == 1) return {0.5 * (domain.lo + domain.hi)};
    std::vector<double> z(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        z[static_cast<std::size_t>(i)] =
            (i == count - 1) ? domain.hi : domain.lo + (domain.hi - domain.lo) * static_cast<double>(i) / (count - 1);
    return z;
}

StateStack project_initial(const InitialDataSpec& spec, const ModeLattice& lattice, int depth, double z) {
    StateStack s = zero_stack(lattice, depth, z);
    const int M = lattice.M;
    auto check_km = [&](int k, int level) {
        if (k < 0 || k > lattice.K)
            throw DataError("initial data mode k = " + std::to_string(k) + " outside 0.." + std::to_string(lattice.K));
        if (level < 0 || level > depth)
            throw DataError("initial data level " + std::to_string(level) + " outside 0.." + std::to_string(depth));
    };

    std::visit(overloaded{
                   [&](const std::vector<CoefficientEntry>& entries) {
                       for (const auto& e : entries) {
                           check_km(e.k, e.level);
                           if (e.m < 0 || e.m >= M)
                               throw DataError("initial data Hermite index m = " + std::to_string(e.m) + " outside 0.." +
                                               std::to_string(M - 1));
                           s.level(e.k, e.level)(e.m) += e.value;
                       }
                   },
                   [&](const std::vector<ProfileTerm>& terms) {
                       for (const auto& term : terms) {
                           check_km(term.k, term.level);
                           const int deg = std::max<int>(0, static_cast<int>(term.poly.size()) - 1);
                           const int nodes = std::max(2 * M, deg + M);
                           auto p = [&](double v) {
                               double acc = 0.0;
                               for (auto it = term.poly.rbegin(); it != term.poly.rend(); ++it) acc = acc * v + *it;
                               return std::complex<double>(acc, 0.0);
                           };
                           s.level(term.k, term.level) += term.fourier * project_weighted<double>(p, M, nodes);
                       }
                   },
                   [&](const RandomData& r) {
                       std::mt19937_64 gen(r.seed);
                       std::uniform_real_distribution<double> u(-r.amplitude, r.amplitude);
                       const int filled = r.random_levels ? depth + 1 : 1;
                       for (int n = 0; n < filled; ++n)
                           for (int k = 0; k <= lattice.K; ++k)
                               for (int m = 0; m < M; ++m) {
                                   const double re = u(gen);
                                   const double im = (k == 0) ? 0.0 : u(gen);
                                   s.level(k, n)(m) = {re, im};
                               }
                   },
               },
               spec.source);

    for (int n = 0; n <= depth; ++n) {
        auto h0 = s.level(0, n);
        if (spec.normalization == NormalizationMode::Reject) {
            const HermiteVec<double> v{0, h0};
            const auto mom = moments_of(v);
            const std::pair<const char*, std::complex<double>> named[] = {
                {"omega_0", mom.omega}, {"mu_0", mom.mu}, {"tau_0", mom.tau}};
            for (const auto& [name, val] : named)
                if (std::abs(val) > kNormalizationTol)
                    throw DataError(std::string("initial data violate the normalization: ") + name + " = " +
                                    std::to_string(std::abs(val)) + " at level " + std::to_string(n));
        }
        h0.head(3).setZero();
    }
    return s;
}

}  // namespace hypobgk
