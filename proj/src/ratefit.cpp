#include "fdabs/ratefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdabs {

namespace {

double record_norm(const StepRecord& rec, NormOrder r, const Params& p) {
    if (r.is_inf) return rec.norm_Linf;
    if (r.value == 1.0) return rec.norm_L1;
    if (r.value == 2.0) return rec.norm_L2;
    if (r.value == p.m + 1.0) return rec.norm_Lm1;
    raise(Errc::validation_error,
          "norm order not recorded; trajectories carry r in {1, m+1, 2, inf}");
}

struct LineFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::size_t n = 0;
};

LineFit least_squares(const std::vector<double>& x,
                      const std::vector<double>& y) {
    LineFit f;
    f.n = x.size();
    const double dn = static_cast<double>(f.n);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / dn, my = sy / dn;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    if (f.n > 2) {
        const double intercept = my - f.slope * mx;
        double ss = 0.0;
        for (std::size_t i = 0; i < f.n; ++i) {
            const double e = y[i] - (intercept + f.slope * x[i]);
            ss += e * e;
        }
        f.stderr_slope = std::sqrt(ss / (static_cast<double>(f.n) - 2.0) / sxx);
    }
    return f;
}

LineFit fit_window_slope(const Trajectory& tr, NormOrder r, FitWindow w,
                         double Te) {
    std::vector<double> x, y;
    for (const auto& rec : tr.records) {
        if (rec.t < w.f_lo * Te || rec.t > w.f_hi * Te) continue;
        const double tau = Te - rec.t;
        const double v = record_norm(rec, r, tr.params);
        if (!(tau > 0.0) || !(v > 0.0)) continue;
        x.push_back(std::log(tau));
        y.push_back(std::log(v));
    }
    if (x.size() < 10) {
        raise(Errc::insufficient_data,
              "fewer than 10 records in the fit window");
    }
    return least_squares(x, y);
}

} // namespace

RescaledFrame to_selfsimilar(const State& s, const RadialGrid& g, double T_e,
                             const DerivedExponents& ex) {
    if (!(s.t < T_e)) {
        raise(Errc::time_out_of_range, "state time t = " + std::to_string(s.t) +
                                           " is not below T_e = " +
                                           std::to_string(T_e));
    }
    const double tau = T_e - s.t;
    RescaledFrame f;
    f.s = std::log(T_e / tau);
    const double yscale = std::pow(tau, ex.beta);
    const double vscale = std::pow(tau, -ex.alpha);
    f.y_nodes.resize(g.nodes.size());
    f.v_values.resize(s.values.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        f.y_nodes[i] = g.nodes[i] * yscale;
        f.v_values[i] = s.values[i] * vscale;
    }
    return f;
}

std::vector<RescaledNormPoint> rescaled_norm_series(
    const Trajectory& tr, const DerivedExponents& ex) {
    const double Te = tr.T_e_est;
    std::vector<RescaledNormPoint> out;
    out.reserve(tr.records.size());
    const double m1 = tr.params.m + 1.0;
    for (const auto& rec : tr.records) {
        if (!(rec.t < Te)) {
            raise(Errc::time_out_of_range,
                  "record at t = " + std::to_string(rec.t) +
                      " is not below T_e_est");
        }
        const double tau = Te - rec.t;
        RescaledNormPoint pt;
        pt.s = std::log(Te / tau);
        pt.v_L1 = rec.norm_L1 / std::pow(tau, ex.rate(NormOrder::finite(1.0)));
        pt.v_Lm1 = rec.norm_Lm1 / std::pow(tau, ex.rate(NormOrder::finite(m1)));
        pt.v_L2 = rec.norm_L2 / std::pow(tau, ex.rate(NormOrder::finite(2.0)));
        pt.v_Linf = rec.norm_Linf / std::pow(tau, ex.rate(NormOrder::inf()));
        out.push_back(pt);
    }
    return out;
}

RateFitResult fit_rate(const Trajectory& tr, const DerivedExponents& ex,
                       NormOrder r, FitWindow window, double tolerance) {
    if (!tr.extinguished) {
        raise(Errc::not_extinguished, "rate fit requires T_e_est");
    }
    const double Te = tr.T_e_est;
    RateFitResult res;
    res.order = r;
    res.window_lo = window.f_lo * Te;
    res.window_hi = window.f_hi * Te;
    res.expected = ex.rate(r);

    const LineFit base = fit_window_slope(tr, r, window, Te);
    res.slope = base.slope;
    res.n_records = base.n;

    // sensitivity of the slope to T_e_est +/- one final time step
    double sens = 0.0;
    const double dt_last = tr.records.empty() ? 0.0 : tr.records.back().dt;
    if (dt_last > 0.0) {
        for (const double Tp : {Te + dt_last, Te - dt_last}) {
            try {
                const LineFit f = fit_window_slope(tr, r, window, Tp);
                sens = std::max(sens, std::fabs(f.slope - base.slope));
            } catch (const Error&) {
                // window degenerate under the perturbation; skip
            }
        }
    }
    res.stderr_slope = std::max(base.stderr_slope, sens);
    res.rel_dev = std::fabs(res.slope - res.expected) / res.expected;
    res.pass = res.rel_dev <= tolerance;
    return res;
}

SandwichResult sandwich_ratio(const Trajectory& tr,
                              const DerivedExponents& ex, NormOrder r,
                              FitWindow window) {
    if (!tr.extinguished) {
        raise(Errc::not_extinguished, "sandwich ratio requires T_e_est");
    }
    const double Te = tr.T_e_est;
    const double rate = ex.rate(r);
    SandwichResult out;
    out.order = r;
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = 0.0;
    for (const auto& rec : tr.records) {
        if (rec.t < window.f_lo * Te || rec.t > window.f_hi * Te) continue;
        const double tau = Te - rec.t;
        if (!(tau > 0.0)) continue;
        const double ratio =
            record_norm(rec, r, tr.params) / std::pow(tau, rate);
        out.lower = std::min(out.lower, ratio);
        out.upper = std::max(out.upper, ratio);
    }
    if (!(out.lower > 0.0) || out.upper == 0.0) {
        raise(Errc::insufficient_data, "no records in the sandwich window");
    }
    out.C_over_c = out.upper / out.lower;
    return out;
}

} // namespace fdabs
