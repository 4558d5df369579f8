#pragma once

#include <vector>

#include "fdabs/solver.hpp"

namespace fdabs {

/// One state mapped to self-similar variables:
///   s = ln(T_e/(T_e - t)),  y_i = r_i (T_e - t)^beta,
///   v_i = (T_e - t)^{-alpha} u_i.
struct RescaledFrame {
    double s = 0.0;
    std::vector<double> y_nodes;
    std::vector<double> v_values;
};

RescaledFrame to_selfsimilar(const State& s, const RadialGrid& g, double T_e,
                             const DerivedExponents& ex);

/// Rescaled norm series computed directly from recorded norms via
/// ||v(s)||_r = ||u(t)||_r / (T_e - t)^{alpha - N beta / r}; no regridding.
struct RescaledNormPoint {
    double s = 0.0;
    double v_L1 = 0.0;
    double v_Lm1 = 0.0;
    double v_L2 = 0.0;
    double v_Linf = 0.0;
};

std::vector<RescaledNormPoint> rescaled_norm_series(
    const Trajectory& tr, const DerivedExponents& ex);

/// Least-squares slope of log ||u(t)||_r against log(T_e_est - t) over the
/// records with t in (f_lo, f_hi) * T_e_est.
struct RateFitResult {
    NormOrder order;
    double slope = 0.0;
    double stderr_slope = 0.0;  // max of LS standard error and the
                                // T_e_est +/- (last dt) sensitivity
    double window_lo = 0.0;     // in time units
    double window_hi = 0.0;
    double expected = 0.0;      // alpha - N beta / r
    double rel_dev = 0.0;
    bool pass = false;
    std::size_t n_records = 0;
};

struct FitWindow {
    double f_lo = 0.7;
    double f_hi = 0.99;
};

RateFitResult fit_rate(const Trajectory& tr, const DerivedExponents& ex,
                       NormOrder r, FitWindow window = {},
                       double tolerance = 0.10);

/// Ratio band of ||u(t)||_r / (T_e_est - t)^{rate(r)} over the fit window;
/// C_over_c = max/min. Finite and small when upper and lower bounds share
/// the exponent.
struct SandwichResult {
    NormOrder order;
    double lower = 0.0;   // c
    double upper = 0.0;   // C
    double C_over_c = 0.0;
};

SandwichResult sandwich_ratio(const Trajectory& tr,
                              const DerivedExponents& ex, NormOrder r,
                              FitWindow window = {});

} // namespace fdabs
