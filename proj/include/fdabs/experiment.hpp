#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdabs/diagnostics.hpp"
#include "fdabs/ratefit.hpp"
#include "fdabs/solver.hpp"

namespace fdabs {

/// Built-in initial-datum families. capped_power uses the regime's own
/// decay exponent 2/(q-m), so the decay hypothesis holds with kappa0 = A.
enum class InitialFamily : std::uint8_t {
    Flat,         // u0 = A
    CappedPower,  // u0 = A min(1, r^{-2/(q-m)})
    Indicator,    // u0 = 1 on [0, R], 0 beyond
    Gaussian,     // u0 = A exp(-r^2/(2 sigma^2))
};

const char* family_name(InitialFamily f);

struct InitialDatum {
    InitialFamily family = InitialFamily::Flat;
    double A = 1.0;      // amplitude (Flat, CappedPower, Gaussian)
    double R = 1.0;      // support radius (Indicator)
    double sigma = 1.0;  // width (Gaussian)
};

/// Which post-run checks are enabled.
struct CheckToggles {
    bool barrier = true;
    bool linf_lower = true;
    bool positivity = true;
    bool dt_bound = true;
};

struct ExperimentConfig {
    double N = 1.0;
    double m = 0.5;
    double q = 0.75;

    InitialDatum initial;

    double R_max = 20.0;
    std::size_t M = 2048;

    SolverConfig solver;

    CheckToggles checks;
    bool do_ratefit = true;  // extinction-rate regression + verdicts; flat
                             // data does not satisfy the decay hypothesis,
                             // so its finite-r fits are off by design
    FitWindow window;
    double fit_tolerance = 0.10;

    std::filesystem::path out_dir;  // empty = no files written
    int workers = 0;                // 0 = available parallelism

    std::vector<double> sweep_N;
    std::vector<double> sweep_m;
    std::vector<double> sweep_q;

    bool refine_Te = false;  // Richardson rerun at dt/2 for T_e_est

    /// Canonical key=value echo (sorted keys, full precision) and its hash.
    std::string canonical_text() const;
    std::string config_hash() const;
};

/// Parses the documented key=value text. Unknown keys, malformed values and
/// duplicate keys raise parse_error with the offending line and key;
/// inadmissible (N, m, q) raises through validate_params.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& file);

struct CheckSummary {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;
};

struct RunSummary {
    ExperimentConfig config;
    DerivedExponents exponents{};
    double T_e_est = 0.0;
    double T_e_raw = 0.0;
    double clipped_mass = 0.0;
    bool clipping_flagged = false;
    std::vector<CheckSummary> check_results;
    std::vector<RateFitResult> fit_results;
    double energy_pass_fraction = 0.0;  // steps satisfying the energy tol
    double wall_clock_ms = 0.0;
    bool all_pass = false;

    std::string to_json() const;
};

/// Executes run -> diagnostics -> rescale/fit, writes trajectory.csv,
/// checks.csv, ratefit.csv, vnorms.csv, snapshots/ and summary.json under
/// config.out_dir (when set). Solver errors propagate after partial
/// outputs are flushed.
RunSummary run_experiment(const ExperimentConfig& config);

/// Same, but also hands back the trajectory (the CLI check/ratefit paths
/// and tests want it).
RunSummary run_experiment(const ExperimentConfig& config, Trajectory* out);

struct SweepRow {
    std::size_t index = 0;
    double N = 0.0, m = 0.0, q = 0.0;
    std::string status;  // "ok", "skipped(<errc>)" or "failed(<errc>)"
    std::optional<RunSummary> summary;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t n_ok = 0;
    std::size_t n_skipped = 0;
    std::size_t n_failed = 0;
};

/// Cartesian product of the sweep axes; invalid combinations are skipped
/// (recorded per row), run failures recorded per row, the sweep continues.
/// Valid runs execute concurrently on a bounded worker pool. Throws
/// empty_sweep when the product is empty. Writes sweep.csv when out_dir set.
SweepResult run_sweep(const ExperimentConfig& config);

/// Builds the initial datum on a grid.
State make_initial_state(const InitialDatum& d, const RadialGrid& g,
                         const DerivedExponents& ex);

} // namespace fdabs
