#pragma once

#include <string>

#include "fdabs/solver.hpp"

namespace fdabs {

/// Barrier u(t,r) <= kappa_eff r^{-2/(q-m)} (time-independent supersolution).
struct BarrierSpec {
    double kappa0 = 0.0;      // smallest constant bounding the initial datum
    double kappa_star = 0.0;  // from DerivedExponents
    double kappa_eff = 0.0;   // max(kappa0, kappa_star)
    double decay = 0.0;       // 2/(q-m)
};

/// Outcome of one check. pass <=> worst_margin >= -tolerance. Margins are
/// signed so a failing check reports how badly and where it failed.
struct CheckReport {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;
    double worst_t = 0.0;
    double worst_r = 0.0;
    double tolerance = 0.0;
    std::string note;
};

/// Smallest kappa0 with u0(r_i) <= kappa0 r_i^{-decay} for all r_i > 0,
/// i.e. max_i u0(r_i) r_i^{decay}. Throws unbounded if not finite.
double fit_kappa0(const State& u0, const RadialGrid& g,
                  const DerivedExponents& ex);

BarrierSpec make_barrier_spec(double kappa0, const DerivedExponents& ex);

/// u(t, r_i) <= kappa_eff r_i^{-decay} (1 + tol) at every snapshot node
/// with r_i > 0 (the origin is excluded; the barrier blows up there).
CheckReport check_barrier(const Trajectory& tr, const BarrierSpec& spec,
                          double tol = 1e-6);

/// ||u(t)||_inf >= [(1-q)(T_e_est - t)]^{1/(1-q)} with 5% relative slack,
/// restricted to records with T_e_est - t >= 100 dt.
CheckReport check_linf_lower(const Trajectory& tr,
                             const DerivedExponents& ex);

/// All interior node values strictly positive at snapshots with
/// 0 < t < T_e_est - 10 dt (boundary node excluded under DirichletZero).
CheckReport check_positivity(const Trajectory& tr);

/// Forward quotient between consecutive snapshots obeys
/// (u_{k+1}-u_k)/(t_{k+1}-t_k) <= u_{k+1}/((1-m) t_{k+1}) + newton_tol
/// nodewise; t = 0 is excluded (the bound degenerates there).
CheckReport check_dt_bound(const Trajectory& tr, const Params& p);

/// Closed-form supersolution residual of the barrier profile
/// Sigma_kappa = kappa r^{-2/(q-m)}:
///   kappa^m (kappa^{q-m} - kappa_*^{q-m}) r^{-2q/(q-m)}
/// which lower-bounds -lap(Sigma^m) + Sigma^q; >= 0 iff kappa >= kappa_*.
double barrier_supersolution_residual(double kappa, double r,
                                      const DerivedExponents& ex);

/// The full expression -lap(Sigma_kappa^m) + Sigma_kappa^q at radius r
/// (exact radial Laplacian of the power profile, closed form).
double barrier_operator_value(double kappa, double r, const Params& p,
                              const DerivedExponents& ex);

} // namespace fdabs
