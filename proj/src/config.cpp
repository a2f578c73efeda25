#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hypobgk/experiment.hpp"

namespace hypobgk {

using nlohmann::json;

namespace {

/// Collects every configuration problem before failing.
class Problems {
public:
    void add(std::string msg) { list_.push_back(std::move(msg)); }
    bool empty() const { return list_.empty(); }

    [[noreturn]] void raise() const {
        std::ostringstream os;
        os << "invalid configuration (" << list_.size() << " problem" << (list_.size() == 1 ? "" : "s") << "):";
        for (const auto& m : list_) os << "\n  - " << m;
        throw UsageError(os.str());
    }

    template <typename T>
    T get(const json& j, const std::string& key, T fallback, const std::string& where) {
        if (!j.is_object() || !j.contains(key)) return fallback;
        try {
            return j.at(key).get<T>();
        } catch (const json::exception&) {
            add(where + key + ": wrong type");
            return fallback;
        }
    }

private:
    std::vector<std::string> list_;
};

SigmaLaw parse_law(const json& j, Problems& p) {
    const std::string type = p.get<std::string>(j, "type", "constant", "sigma.");
    if (type == "constant") return sigma_law::Constant{p.get<double>(j, "sigma0", 1.0, "sigma.")};
    if (type == "affine")
        return sigma_law::Affine{p.get<double>(j, "sigma0", 1.0, "sigma."), p.get<double>(j, "c1", 0.0, "sigma.")};
    if (type == "trigonometric")
        return sigma_law::Trigonometric{p.get<double>(j, "sigma0", 1.0, "sigma."),
                                        p.get<double>(j, "amplitude", 0.0, "sigma."),
                                        p.get<double>(j, "frequency", 1.0, "sigma.")};
    if (type == "polynomial") {
        auto c = p.get<std::vector<double>>(j, "coeffs", {}, "sigma.");
        if (c.empty()) p.add("sigma.coeffs: polynomial model needs at least one coefficient");
        return sigma_law::Polynomial{c.empty() ? std::vector<double>{1.0} : c};
    }
    p.add("sigma.type: unknown model '" + type + "' (constant, affine, trigonometric, polynomial)");
    return sigma_law::Constant{1.0};
}

json law_to_json(const SigmaLaw& law) {
    if (const auto* c = std::get_if<sigma_law::Constant>(&law)) return {{"type", "constant"}, {"sigma0", c->sigma0}};
    if (const auto* a = std::get_if<sigma_law::Affine>(&law))
        return {{"type", "affine"}, {"sigma0", a->sigma0}, {"c1", a->c1}};
    if (const auto* t = std::get_if<sigma_law::Trigonometric>(&law))
        return {{"type", "trigonometric"}, {"sigma0", t->sigma0}, {"amplitude", t->amplitude}, {"frequency", t->frequency}};
    return {{"type", "polynomial"}, {"coeffs", std::get<sigma_law::Polynomial>(law).coeffs}};
}

InitialDataSpec parse_initial(const json& j, Problems& p) {
    InitialDataSpec spec;
    const std::string norm = p.get<std::string>(j, "normalization", "enforce", "initial.");
    if (norm == "enforce")
        spec.normalization = NormalizationMode::Enforce;
    else if (norm == "reject")
        spec.normalization = NormalizationMode::Reject;
    else
        p.add("initial.normalization: expected 'enforce' or 'reject'");

    const std::string type = p.get<std::string>(j, "type", "random", "initial.");
    if (type == "random") {
        RandomData r;
        r.seed = p.get<std::uint64_t>(j, "seed", 0, "initial.");
        r.amplitude = p.get<double>(j, "amplitude", 1.0, "initial.");
        r.random_levels = p.get<bool>(j, "random_levels", false, "initial.");
        if (!(r.amplitude > 0.0)) p.add("initial.amplitude must be positive");
        spec.source = r;
    } else if (type == "coefficients") {
        std::vector<CoefficientEntry> entries;
        if (j.contains("entries") && j["entries"].is_array()) {
            for (const auto& e : j["entries"])
                entries.push_back({p.get<int>(e, "k", 0, "initial.entries."), p.get<int>(e, "m", 0, "initial.entries."),
                                   p.get<int>(e, "level", 0, "initial.entries."),
                                   {p.get<double>(e, "re", 0.0, "initial.entries."),
                                    p.get<double>(e, "im", 0.0, "initial.entries.")}});
        } else {
            p.add("initial.entries: coefficient data need an 'entries' array");
        }
        spec.source = entries;
    } else if (type == "profile") {
        std::vector<ProfileTerm> terms;
        if (j.contains("terms") && j["terms"].is_array()) {
            for (const auto& t : j["terms"])
                terms.push_back({p.get<int>(t, "k", 0, "initial.terms."),
                                 {p.get<double>(t, "re", 1.0, "initial.terms."), p.get<double>(t, "im", 0.0, "initial.terms.")},
                                 p.get<std::vector<double>>(t, "poly", {}, "initial.terms."),
                                 p.get<int>(t, "level", 0, "initial.terms.")});
        } else {
            p.add("initial.terms: profile data need a 'terms' array");
        }
        spec.source = terms;
    } else {
        p.add("initial.type: unknown '" + type + "' (random, coefficients, profile)");
    }
    return spec;
}

json initial_to_json(const InitialDataSpec& spec) {
    json j;
    j["normalization"] = spec.normalization == NormalizationMode::Enforce ? "enforce" : "reject";
    if (const auto* r = std::get_if<RandomData>(&spec.source)) {
        j["type"] = "random";
        j["seed"] = r->seed;
        j["amplitude"] = r->amplitude;
        j["random_levels"] = r->random_levels;
    } else if (const auto* e = std::get_if<std::vector<CoefficientEntry>>(&spec.source)) {
        j["type"] = "coefficients";
        j["entries"] = json::array();
        for (const auto& c : *e)
            j["entries"].push_back({{"k", c.k}, {"m", c.m}, {"level", c.level}, {"re", c.value.real()}, {"im", c.value.imag()}});
    } else {
        j["type"] = "profile";
        j["terms"] = json::array();
        for (const auto& t : std::get<std::vector<ProfileTerm>>(spec.source))
            j["terms"].push_back(
                {{"k", t.k}, {"re", t.fourier.real()}, {"im", t.fourier.imag()}, {"poly", t.poly}, {"level", t.level}});
    }
    return j;
}

}  // namespace

std::vector<double> TimeGrid::samples() const {
    if (!points.empty()) return points;
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(t0 + static_cast<double>(i) * dt);
    return out;
}

std::vector<double> RunConfig::z_samples() const {
    if (!z.points.empty()) return z.points;
    return z_grid(sigma.domain, z.count);
}

RunConfig parse_config(const json& j) {
    Problems p;
    RunConfig c;
    if (!j.is_object()) {
        p.add("top level must be an object");
        p.raise();
    }
    c.run_id = p.get<std::string>(j, "run_id", c.run_id, "");
    c.L = p.get<double>(j, "L", c.L, "");
    c.K = p.get<int>(j, "K", c.K, "");
    c.M = p.get<int>(j, "M", c.M, "");
    c.N = p.get<int>(j, "N", c.N, "");
    if (!(c.L > 0.0) || !std::isfinite(c.L)) p.add("L must be positive and finite");
    if (c.K < 1) p.add("K must be >= 1");
    if (c.M < kMinTruncation) p.add("M must be >= 5");
    if (c.N < 0) p.add("N must be >= 0");
    if (c.run_id.empty() || c.run_id.find_first_of(",\n/") != std::string::npos)
        p.add("run_id must be non-empty without commas, slashes or newlines");

    if (j.contains("time")) {
        const json& t = j["time"];
        c.time.points = p.get<std::vector<double>>(t, "points", {}, "time.");
        c.time.t0 = p.get<double>(t, "t0", c.time.t0, "time.");
        c.time.t1 = p.get<double>(t, "t1", c.time.t1, "time.");
        c.time.dt = p.get<double>(t, "dt", c.time.dt, "time.");
    }
    if (c.time.points.empty()) {
        if (!(c.time.dt > 0.0)) p.add("time.dt must be positive");
        if (!(c.time.t1 >= c.time.t0)) p.add("time.t1 must be >= time.t0");
        if (!(c.time.t0 >= 0.0)) p.add("time.t0 must be >= 0");
    } else {
        for (std::size_t i = 0; i < c.time.points.size(); ++i) {
            if (!(c.time.points[i] >= 0.0)) p.add("time.points must be >= 0");
            if (i && c.time.points[i] < c.time.points[i - 1]) p.add("time.points must be sorted");
        }
    }

    if (j.contains("sigma")) {
        const json& s = j["sigma"];
        c.sigma.law = parse_law(s, p);
        const auto dom = p.get<std::vector<double>>(s, "z_domain", {c.sigma.domain.lo, c.sigma.domain.hi}, "sigma.");
        if (dom.size() != 2 || !(dom[0] <= dom[1]))
            p.add("sigma.z_domain must be [lo, hi] with lo <= hi");
        else
            c.sigma.domain = {dom[0], dom[1]};
    }
    try {
        sigma_bounds(c.sigma);
    } catch (const Error& e) {
        p.add(std::string("sigma: ") + e.what());
    }

    if (j.contains("initial")) c.initial = parse_initial(j["initial"], p);

    if (j.contains("z_grid")) {
        c.z.count = p.get<int>(j["z_grid"], "count", c.z.count, "z_grid.");
        c.z.points = p.get<std::vector<double>>(j["z_grid"], "points", {}, "z_grid.");
    }
    if (c.z.points.empty() && c.z.count < 1) p.add("z_grid.count must be >= 1");
    for (double z : c.z.points)
        if (!(z >= c.sigma.domain.lo && z <= c.sigma.domain.hi)) p.add("z_grid.points must lie in sigma.z_domain");

    if (j.contains("alpha")) {
        const json& a = j["alpha"];
        const std::string s = p.get<std::string>(a, "strategy", "optimize", "alpha.");
        const double v = p.get<double>(a, "value", 0.5, "alpha.");
        if (s == "optimize")
            c.alpha = alpha_strategy::Optimize{};
        else if (s == "fraction") {
            if (!(v > 0.0 && v < 1.0)) p.add("alpha.value: fraction must lie in (0, 1)");
            c.alpha = alpha_strategy::Fraction{v};
        } else if (s == "fixed") {
            if (!(v > 0.0)) p.add("alpha.value must be positive");
            c.alpha = alpha_strategy::Fixed{v};
        } else
            p.add("alpha.strategy: expected optimize, fraction or fixed");
    }

    c.output_dir = p.get<std::string>(j, "output_dir", c.output_dir, "");
    if (j.contains("tolerances")) {
        c.tol.envelope = p.get<double>(j["tolerances"], "envelope", c.tol.envelope, "tolerances.");
        c.tol.inequality = p.get<double>(j["tolerances"], "inequality", c.tol.inequality, "tolerances.");
    }
    if (!(c.tol.envelope >= 0.0) || !(c.tol.inequality >= 0.0)) p.add("tolerances must be >= 0");
    if (j.contains("verify")) c.verify_sigma_points = p.get<int>(j["verify"], "sigma_points", c.verify_sigma_points, "verify.");
    if (c.verify_sigma_points < 1) p.add("verify.sigma_points must be >= 1");
    c.sigma_grid_resolution = p.get<int>(j, "sigma_grid_resolution", c.sigma_grid_resolution, "");
    if (c.sigma_grid_resolution < 2) p.add("sigma_grid_resolution must be >= 2");

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        c.sweep.L_values = p.get<std::vector<double>>(s, "L", {}, "sweep.");
        c.sweep.parameter = p.get<std::string>(s, "parameter", "", "sweep.");
        c.sweep.values = p.get<std::vector<double>>(s, "values", {}, "sweep.");
        for (double L : c.sweep.L_values)
            if (!(L > 0.0)) p.add("sweep.L values must be positive");
        if (!c.sweep.parameter.empty()) {
            if (c.sweep.values.empty()) p.add("sweep.values must be non-empty when sweep.parameter is set");
            for (double v : c.sweep.values) {
                try {
                    sigma_bounds(CollisionFrequencyModel{with_parameter(c.sigma.law, c.sweep.parameter, v), c.sigma.domain});
                } catch (const Error& e) {
                    p.add("sweep " + c.sweep.parameter + " = " + std::to_string(v) + ": " + e.what());
                    break;
                }
            }
        }
    }

    if (!p.empty()) p.raise();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["run_id"] = c.run_id;
    j["L"] = c.L;
    j["K"] = c.K;
    j["M"] = c.M;
    j["N"] = c.N;
    j["time"] = {{"t0", c.time.t0}, {"t1", c.time.t1}, {"dt", c.time.dt}};
    if (!c.time.points.empty()) j["time"]["points"] = c.time.points;
    j["sigma"] = law_to_json(c.sigma.law);
    j["sigma"]["z_domain"] = {c.sigma.domain.lo, c.sigma.domain.hi};
    j["initial"] = initial_to_json(c.initial);
    j["z_grid"] = {{"count", c.z.count}};
    if (!c.z.points.empty()) j["z_grid"]["points"] = c.z.points;
    if (std::holds_alternative<alpha_strategy::Optimize>(c.alpha))
        j["alpha"] = {{"strategy", "optimize"}};
    else if (const auto* f = std::get_if<alpha_strategy::Fraction>(&c.alpha))
        j["alpha"] = {{"strategy", "fraction"}, {"value", f->value}};
    else
        j["alpha"] = {{"strategy", "fixed"}, {"value", std::get<alpha_strategy::Fixed>(c.alpha).value}};
    j["output_dir"] = c.output_dir;
    j["tolerances"] = {{"envelope", c.tol.envelope}, {"inequality", c.tol.inequality}};
    j["verify"] = {{"sigma_points", c.verify_sigma_points}};
    j["sigma_grid_resolution"] = c.sigma_grid_resolution;
    if (!c.sweep.L_values.empty() || !c.sweep.parameter.empty()) {
        j["sweep"] = {{"L", c.sweep.L_values}, {"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
    }
    return j;
}

SigmaLaw with_parameter(const SigmaLaw& law, const std::string& name, double value) {
    SigmaLaw out = law;
    auto bad = [&] { throw UsageError("sigma model has no parameter '" + name + "'"); };
    std::visit(
        [&](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, sigma_law::Constant>) {
                if (name == "sigma0") l.sigma0 = value; else bad();
            } else if constexpr (std::is_same_v<T, sigma_law::Affine>) {
                if (name == "sigma0") l.sigma0 = value;
                else if (name == "c1") l.c1 = value;
                else bad();
            } else if constexpr (std::is_same_v<T, sigma_law::Trigonometric>) {
                if (name == "sigma0") l.sigma0 = value;
                else if (name == "amplitude") l.amplitude = value;
                else if (name == "frequency") l.frequency = value;
                else bad();
            } else {
                if (name.size() < 2 || name[0] != 'a') bad();
                std::size_t idx = 0;
                try {
                    idx = std::stoul(name.substr(1));
                } catch (const std::exception&) {
                    bad();
                }
                if (idx >= l.coeffs.size()) l.coeffs.resize(idx + 1, 0.0);
                l.coeffs[idx] = value;
            }
        },
        out);
    return out;
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const CommandOptions& opts) {
    std::filesystem::path dir;
    if (opts.out)
        dir = *opts.out;
    else if (const char* env = std::getenv("HYPOBGK_OUT"); env && *env)
        dir = env;
    else
        dir = cfg.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

}  // namespace hypobgk
