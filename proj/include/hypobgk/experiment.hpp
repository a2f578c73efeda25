#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypobgk/analysis.hpp"
#include "hypobgk/lyapunov.hpp"
#include "hypobgk/uq_models.hpp"

namespace hypobgk {

/// Sample times: explicit list, or t0, t0 + dt, ... up to t1.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 20.0;
    double dt = 0.5;
    std::vector<double> points;

    std::vector<double> samples() const;
};

struct ZGridSpec {
    int count = 1;
    std::vector<double> points;  ///< overrides count when non-empty
};

struct SweepSpec {
    std::vector<double> L_values;
    std::string parameter;  ///< sigma-law parameter name, empty for none
    std::vector<double> values;
};

struct Tolerances {
    double envelope = kEnvelopeTol;
    double inequality = 1e-10;
};

/// Everything a run needs; all module preconditions are checked by parse_config.
struct RunConfig {
    std::string run_id = "run";
    double L = 6.283185307179586;
    int K = 4;
    int M = 12;
    int N = 0;
    TimeGrid time;
    CollisionFrequencyModel sigma{sigma_law::Constant{1.0}, {-1.0, 1.0}};
    InitialDataSpec initial;
    ZGridSpec z;
    AlphaStrategy alpha = alpha_strategy::Optimize{};
    std::string output_dir = "out";
    Tolerances tol;
    int verify_sigma_points = 33;
    int sigma_grid_resolution = kSigmaGrid;
    SweepSpec sweep;

    ModeLattice lattice() const { return make_lattice(K, L, M); }
    std::vector<double> z_samples() const;
};

/// Parses and validates; every problem found is reported in one UsageError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Replaces the named sigma-law parameter (sigma0, c1, amplitude, frequency, a0, a1, ...).
SigmaLaw with_parameter(const SigmaLaw& law, const std::string& name, double value);

struct CommandOptions {
    std::optional<std::filesystem::path> out;  ///< overrides the config and HYPOBGK_OUT
    int threads = 1;
    std::optional<std::uint64_t> seed;  ///< overrides the seed of random initial data
    double mu_inflation = 1.0;          ///< debug: multiply mu before verifying
};

/// Output directory: --out, else $HYPOBGK_OUT, else the config value. Created if missing.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const CommandOptions& opts);

/// Certificate plus the Taylor-bound constant chat = Ctilde * C when C exists.
struct CertificateSummary {
    Certificate<double> cert;
    std::optional<double> taylor_C;
    std::optional<double> chat;
};

CertificateSummary certificate_for(const RunConfig& cfg);

// Each command writes its CSVs, prints a summary and returns the exit code
// (0 pass, 1 envelope-violation alarm). Invalid input and numeric failures throw.
int cmd_certify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_verify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_derivatives(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);

/// Header of the per-z summary rows shared by simulate and sweep.
inline const std::vector<std::string> kSummaryHeader{"run_id", "L",      "sigma_param", "z",       "alpha",
                                                     "alpha_max", "lambda_min", "mu",   "lambda", "ctilde",
                                                     "k0_rate",   "max_ratio",  "verdict"};

}  // namespace hypobgk
