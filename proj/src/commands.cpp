#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "hypobgk/csv.hpp"
#include "hypobgk/experiment.hpp"
#include "hypobgk/propagator.hpp"

namespace hypobgk {

namespace {

std::string verdict(bool pass) { return pass ? "pass" : "FAIL"; }

std::string cell(double x) { return format_double(x); }

std::string short_num(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

InitialDataSpec effective_initial(const RunConfig& cfg, const CommandOptions& opts) {
    InitialDataSpec spec = cfg.initial;
    if (auto* r = std::get_if<RandomData>(&spec.source); r && opts.seed) r->seed = *opts.seed;
    return spec;
}

std::optional<std::string> seed_comment(const InitialDataSpec& spec) {
    if (const auto* r = std::get_if<RandomData>(&spec.source)) return "seed=" + std::to_string(r->seed);
    return std::nullopt;
}

/// Log-linear decay rate of ||h_0|| over the trajectory; NaN when the mode vanishes.
double k0_rate(std::span<const StateStack> snaps) {
    std::vector<double> ts, vs;
    for (const auto& s : snaps) {
        const double n = s.level(0, 0).norm();
        if (!(n > 1e-300)) return std::numeric_limits<double>::quiet_NaN();
        ts.push_back(s.t);
        vs.push_back(n);
    }
    if (ts.size() < 2 || ts.back() == ts.front()) return std::numeric_limits<double>::quiet_NaN();
    return fit_decay_rate(ts, vs);
}

struct ZResult {
    std::vector<std::string> summary;
    bool pass = true;
};

/// Entropy-decay run at one z; writes the per-sample file when `per_z` is set.
ZResult simulate_at(const RunConfig& cfg, const CertificateSummary& cs, const InitialDataSpec& spec, double z,
                    const std::string& run_id, const std::string& sigma_param,
                    const std::optional<std::filesystem::path>& per_z) {
    const auto lattice = cfg.lattice();
    const auto times = cfg.time.samples();
    const StateStack init = project_initial(spec, lattice, 0, z);
    const auto snaps = trajectory(init, times, cfg.sigma);
    const auto report = check_entropy_decay(snaps, cs.cert, cfg.tol.envelope);

    if (per_z) {
        CsvWriter w(*per_z, kResultHeader, seed_comment(spec));
        const auto& lv = report.levels.front();
        for (std::size_t i = 0; i < times.size(); ++i)
            w.row({run_id, cell(z), cell(times[i]), "0", cell(lv.observed[i]), cell(lv.envelope[i]), cell(lv.ratio[i]),
                   verdict(lv.ratio[i] <= 1.0 + cfg.tol.envelope)});
    }

    const auto& c = cs.cert;
    ZResult r;
    r.pass = report.pass();
    r.summary = {run_id,       cell(c.L),  sigma_param,       cell(z),         cell(c.alpha),
                 cell(c.alpha_max), cell(c.lambda_min), cell(c.mu), cell(c.lambda), cell(c.ctilde),
                 cell(k0_rate(snaps)), cell(report.max_ratio()), verdict(r.pass)};
    return r;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

CertificateSummary certificate_for(const RunConfig& cfg) {
    const auto [smin, smax] = sigma_bounds(cfg.sigma);
    CertificateSummary s{certify<double>(cfg.L, smin, smax, cfg.alpha, cfg.sigma_grid_resolution), std::nullopt,
                         std::nullopt};
    try {
        s.taylor_C = taylor_bound(cfg.sigma);
        s.chat = *s.taylor_C * s.cert.ctilde;
    } catch (const NotCertifiableError&) {
    }
    return s;
}

int cmd_certify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const auto cs = certificate_for(cfg);
    const auto& c = cs.cert;
    const auto dir = resolve_output_dir(cfg, opts);

    out << "model        " << describe(cfg.sigma) << "\n"
        << "L            " << short_num(c.L) << "\n"
        << "sigma range  [" << short_num(c.sigma_min) << ", " << short_num(c.sigma_max) << "]\n"
        << "alpha        " << short_num(c.alpha) << "  (alpha_max " << short_num(c.alpha_max) << ")\n"
        << "lambda_min   " << short_num(c.lambda_min) << "\n"
        << "mu           " << short_num(c.mu) << "\n"
        << "lambda       " << short_num(c.lambda) << "\n"
        << "ctilde       " << short_num(c.ctilde) << "\n";
    if (cs.taylor_C)
        out << "taylor C     " << short_num(*cs.taylor_C) << "\n"
            << "chat         " << short_num(*cs.chat) << "\n";
    else
        out << "taylor C     none (sigma has no uniform Taylor bound)\n";

    CsvWriter w(dir / "certificate.csv", {"run_id", "L", "sigma_min", "sigma_max", "alpha", "alpha_max", "lambda_min",
                                          "mu", "lambda", "ctilde", "taylor_C", "chat"});
    w.row({cfg.run_id, cell(c.L), cell(c.sigma_min), cell(c.sigma_max), cell(c.alpha), cell(c.alpha_max),
           cell(c.lambda_min), cell(c.mu), cell(c.lambda), cell(c.ctilde), cs.taylor_C ? cell(*cs.taylor_C) : "",
           cs.chat ? cell(*cs.chat) : ""});
    return 0;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const auto cs = certificate_for(cfg);
    Certificate<double> cert = cs.cert;
    cert.mu *= opts.mu_inflation;
    const auto dir = resolve_output_dir(cfg, opts);

    const int ns = cfg.verify_sigma_points;
    std::vector<double> sigmas;
    for (int i = 0; i < ns; ++i)
        sigmas.push_back(ns == 1 ? 0.5 * (cert.sigma_min + cert.sigma_max)
                                 : cert.sigma_min + (cert.sigma_max - cert.sigma_min) * i / (ns - 1));

    CsvWriter w(dir / "verify.csv", {"run_id", "k", "sigma", "min_eigenvalue", "tolerance", "verdict"});
    std::vector<std::pair<int, double>> failures;
    for (int k = 1; k <= cfg.K; ++k) {
        for (double s : sigmas) {
            const auto A = inequality_matrix<double>(k, cert.l, s, cert.alpha, cert.mu, cfg.M);
            const auto chk = check_hermitian_nonnegative<double>(A, cfg.tol.inequality);
            w.row({cfg.run_id, std::to_string(k), cell(s), cell(chk.min_eigenvalue), cell(chk.tolerance),
                   verdict(chk.confirmed)});
            if (!chk.confirmed) failures.emplace_back(k, s);
        }
    }
    out << "checked " << cfg.K * ns << " (k, sigma) pairs at M = " << cfg.M << " with mu = " << short_num(cert.mu)
        << "\n";
    if (failures.empty()) {
        out << "inequality confirmed\n";
        return 0;
    }
    out << "inequality violated at " << failures.size() << " pairs:\n";
    for (const auto& [k, s] : failures) out << "  k = " << k << ", sigma = " << short_num(s) << "\n";
    return 1;
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const auto cs = certificate_for(cfg);
    const auto dir = resolve_output_dir(cfg, opts);
    const auto spec = effective_initial(cfg, opts);
    const auto zs = cfg.z_samples();

    CsvWriter summary(dir / "summary.csv", kSummaryHeader, seed_comment(spec));
    bool all = true;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const auto r = simulate_at(cfg, cs, spec, zs[i], cfg.run_id, "",
                                   dir / (cfg.run_id + "_z" + std::to_string(i) + ".csv"));
        summary.row(r.summary);
        all = all && r.pass;
        out << "z = " << short_num(zs[i]) << "  max ratio " << r.summary[11] << "  " << r.summary.back() << "\n";
    }
    out << (all ? "entropy decay confirmed" : "entropy decay VIOLATED") << " at " << zs.size() << " z samples\n";
    return all ? 0 : 1;
}

int cmd_derivatives(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    if (cfg.N < 1) throw UsageError("derivatives needs N >= 1; use simulate for the N = 0 entropy run");
    const auto cs = certificate_for(cfg);
    const auto dir = resolve_output_dir(cfg, opts);
    const auto spec = effective_initial(cfg, opts);
    const auto lattice = cfg.lattice();
    const auto times = cfg.time.samples();
    const auto zs = cfg.z_samples();

    const auto* affine = std::get_if<sigma_law::Affine>(&cfg.sigma.law);
    const auto* constant = std::get_if<sigma_law::Constant>(&cfg.sigma.law);
    const bool affine_path = affine || constant;
    if (!affine_path && !cs.chat)
        throw NotCertifiableError("sigma model " + describe(cfg.sigma) +
                                  " has no uniform Taylor bound; derivative envelopes are not available");
    const double ctilde = affine ? std::abs(affine->c1) * cs.cert.ctilde : 0.0;

    CsvWriter summary(dir / "derivatives_summary.csv", {"run_id", "z", "bound", "level", "H", "max_ratio", "verdict"},
                      seed_comment(spec));
    bool all = true;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double z = zs[i];
        const StateStack init = normalize_for_hypothesis(project_initial(spec, lattice, cfg.N, z), cs.cert.alpha);
        const double H = hypothesis_H(init, cs.cert.alpha);
        const auto snaps = trajectory(init, times, cfg.sigma);

        std::vector<DecayReport> reports;
        if (affine_path) {
            reports.push_back(check_affine(snaps, cs.cert, ctilde, cfg.tol.envelope));
            reports.push_back(check_affine_collapsed(snaps, cs.cert, ctilde, H, cfg.tol.envelope));
        } else {
            reports.push_back(check_taylor(snaps, cs.cert, *cs.chat, H, cfg.tol.envelope));
        }

        CsvWriter w(dir / (cfg.run_id + "_derivatives_z" + std::to_string(i) + ".csv"),
                    {"run_id", "bound", "z", "t", "level", "sqrt_entropy", "envelope", "ratio", "verdict"},
                    seed_comment(spec));
        for (const auto& rep : reports) {
            for (const auto& lv : rep.levels) {
                for (std::size_t j = 0; j < times.size(); ++j)
                    w.row({cfg.run_id, rep.bound, cell(z), cell(times[j]), std::to_string(lv.level),
                           cell(lv.observed[j]), cell(lv.envelope[j]), cell(lv.ratio[j]),
                           verdict(lv.ratio[j] <= 1.0 + cfg.tol.envelope)});
                summary.row({cfg.run_id, cell(z), rep.bound, std::to_string(lv.level), cell(H), cell(lv.max_ratio),
                             verdict(lv.pass)});
            }
            all = all && rep.pass();
            out << "z = " << short_num(z) << "  " << rep.bound << "  H = " << short_num(H) << "  max ratio "
                << short_num(rep.max_ratio()) << "  " << verdict(rep.pass()) << "\n";
        }
    }
    out << (all ? "derivative envelopes confirmed" : "derivative envelopes VIOLATED") << "\n";
    return all ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    const auto dir = resolve_output_dir(cfg, opts);
    const auto spec = effective_initial(cfg, opts);
    const auto Ls = cfg.sweep.L_values.empty() ? std::vector<double>{cfg.L} : cfg.sweep.L_values;
    const bool has_param = !cfg.sweep.parameter.empty();
    const auto params = has_param ? cfg.sweep.values : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
    const auto zs = cfg.z_samples();

    const std::size_t nL = Ls.size(), nP = params.size(), nZ = zs.size();
    const std::size_t total = nL * nP * nZ;
    std::filesystem::create_directories(dir / "sweep");

    struct Row {
        std::vector<std::string> cells;
        bool pass = true;
        bool error = false;
    };
    std::vector<Row> rows(total);

    auto task = [&](std::size_t idx) {
        const std::size_t iZ = idx % nZ, iP = (idx / nZ) % nP, iL = idx / (nZ * nP);
        const std::string id = cfg.run_id + "-" + std::to_string(idx);
        const std::string pcell = has_param ? cell(params[iP]) : "";
        try {
            RunConfig c = cfg;
            c.L = Ls[iL];
            if (has_param) c.sigma.law = with_parameter(cfg.sigma.law, cfg.sweep.parameter, params[iP]);
            const auto cs = certificate_for(c);
            const auto r = simulate_at(c, cs, spec, zs[iZ], id, pcell, dir / "sweep" / (id + ".csv"));
            rows[idx] = {r.summary, r.pass, false};
        } catch (const std::exception& e) {
            std::vector<std::string> cells(kSummaryHeader.size());
            cells[0] = id;
            cells[1] = cell(Ls[iL]);
            cells[2] = pcell;
            cells[3] = cell(zs[iZ]);
            cells.back() = "error: " + sanitize(e.what());
            rows[idx] = {cells, false, true};
        }
    };

    const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(total)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) task(i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    CsvWriter w(dir / "sweep.csv", kSummaryHeader, seed_comment(spec));
    std::size_t fails = 0, errors = 0;
    for (const auto& r : rows) {
        w.row(r.cells);
        if (r.error)
            ++errors;
        else if (!r.pass)
            ++fails;
    }
    out << "sweep: " << total << " points, " << fails << " violations, " << errors << " errors\n";
    if (fails) return 1;
    return errors ? 2 : 0;
}

}  // namespace hypobgk
