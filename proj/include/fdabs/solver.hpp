#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fdabs/norms.hpp"
#include "fdabs/radial_grid.hpp"

namespace fdabs {

enum class BoundaryKind : std::uint8_t {
    DirichletZero,  // u(R_max) = 0 (default; acceptance suite uses this)
    BarrierClamp,   // u(R_max) = max(kappa0, kappa*) R_max^{-2/(q-m)}
};

struct SolverConfig {
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 1e-2;
    // dt is additionally capped by remaining_frac * tau_proxy where
    // tau_proxy = ||u||_inf^{1-q}/(1-q) is the flat-ODE remaining lifetime.
    // Must be <= 0.1; the default is chosen so that the O(dt) extinction
    // drift and the per-step energy-identity residual stay within the
    // acceptance tolerances (see README).
    double remaining_frac = 2.5e-4;
    double growth_factor = 1.2;      // applied after 5 consecutive successes
    int growth_every = 5;

    // Newton residual tolerance, relative to ||u^n||_inf.
    double newton_tol = 1e-10;
    int newton_max_iter = 25;

    double eps_ext = 1e-8;           // extinction threshold on ||u||_inf
    std::size_t snapshot_stride = 25;
    BoundaryKind boundary = BoundaryKind::DirichletZero;
    double boundary_value = 0.0;     // used by BarrierClamp
};

/// One accepted time step. Norm orders recorded: 1, m+1, 2, inf.
struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double norm_L1 = 0.0;
    double norm_Lm1 = 0.0;
    double norm_L2 = 0.0;
    double norm_Linf = 0.0;
    int newton_iters = 0;

    // per-step scheme diagnostics
    double energy_resid = 0.0;  // |dX/((m+1)dt) + D + Y|
    double energy_tol = 0.0;    // 1e-3 max(X^n/dt * 1e-2, D + Y)
    double absorbed = 0.0;      // dt * int u^q (the step's absorbed mass)
    double boundary_outflow = 0.0;  // dt * flux through r = R_max (>= 0)
    double mass_defect = 0.0;   // |X1^n - X1^{n+1} - absorbed - outflow|
};

struct Snapshot {
    double t = 0.0;
    double dt = 0.0;            // dt of the step that produced this state
    std::vector<double> values;
};

/// Full output of one simulation.
struct Trajectory {
    Params params;
    RadialGrid grid;
    SolverConfig config;

    std::vector<StepRecord> records;
    std::vector<Snapshot> snapshots;

    bool extinguished = false;
    double t_stop = 0.0;        // time of the first record at/below eps_ext
    double sup_stop = 0.0;      // ||u||_inf there

    // Extinction-time estimates. T_e_est extrapolates ||u||_inf^{1-q}
    // linearly in t over the trailing records (exact for flat data);
    // T_e_raw is the flat-ODE tail correction t_stop + sup^{1-q}/(1-q),
    // kept for reference and used as fallback when the tail is too short.
    double T_e_est = 0.0;
    double T_e_raw = 0.0;

    double clipped_mass = 0.0;  // total weighted mass removed by clipping
    bool clipping_flagged = false;  // clipped_mass > 1e-6 ||u0||_1
    double initial_L1 = 0.0;
};

/// Result of one backward-Euler step.
struct StepResult {
    State state;
    int newton_iters = 0;
    double residual = 0.0;
};

/// Solves u^{n+1} - dt lap(u^{n+1})^m + dt (u^{n+1})^q = u^n nodewise by
/// damped Newton on the transformed variable w = u^m (same nonlinear
/// system, bounded Jacobian entries near u = 0). Throws newton_divergence
/// if the residual does not reach newton_tol * ||u^n||_inf within
/// newton_max_iter iterations. The result is clipped to >= 0; clipped
/// magnitudes never exceed newton_tol (clipped mass is reported by run()).
StepResult step(const State& s, const RadialGrid& g, const Params& p,
                const SolverConfig& c, double dt);

/// Integrates from u0 until ||u||_inf <= eps_ext with the adaptive step
/// policy: halve on Newton failure, grow by growth_factor after
/// growth_every consecutive successes, cap by remaining_frac * tau_proxy.
/// Throws step_too_small or non_extinction.
Trajectory run(const State& u0, const RadialGrid& g, const Params& p,
               const SolverConfig& c);

/// T_e estimate of a finished trajectory; throws not_extinguished.
double estimate_extinction(const Trajectory& tr);

/// Richardson-refined estimate: reruns at dt halved (dt_init, dt_min,
/// dt_max, remaining_frac all halved) and extrapolates the order-1 error.
double richardson_extinction(const State& u0, const RadialGrid& g,
                             const Params& p, const SolverConfig& c);

} // namespace fdabs
