#include "fdabs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdabs {

double fit_kappa0(const State& u0, const RadialGrid& g,
                  const DerivedExponents& ex) {
    double kappa0 = 0.0;
    for (std::size_t i = 1; i < u0.values.size(); ++i) {
        kappa0 = std::max(kappa0,
                          u0.values[i] * std::pow(g.nodes[i], ex.decay));
    }
    if (!std::isfinite(kappa0)) {
        raise(Errc::unbounded, "no finite kappa0 bounds the initial datum");
    }
    return kappa0;
}

BarrierSpec make_barrier_spec(double kappa0, const DerivedExponents& ex) {
    BarrierSpec s;
    s.kappa0 = kappa0;
    s.kappa_star = ex.kappa_star;
    s.kappa_eff = std::max(kappa0, ex.kappa_star);
    s.decay = ex.decay;
    return s;
}

CheckReport check_barrier(const Trajectory& tr, const BarrierSpec& spec,
                          double tol) {
    CheckReport rep;
    rep.name = "barrier";
    rep.tolerance = tol;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto& g = tr.grid;
    for (const auto& snap : tr.snapshots) {
        for (std::size_t i = 1; i < snap.values.size(); ++i) {
            const double bound =
                spec.kappa_eff * std::pow(g.nodes[i], -spec.decay);
            const double margin = (bound - snap.values[i]) / bound;
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_t = snap.t;
                rep.worst_r = g.nodes[i];
            }
        }
    }
    rep.pass = rep.worst_margin >= -tol;
    return rep;
}

CheckReport check_linf_lower(const Trajectory& tr,
                             const DerivedExponents& ex) {
    CheckReport rep;
    rep.name = "linf_lower";
    rep.tolerance = 0.05;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const double Te = tr.T_e_est;
    const double q = ex.q;
    for (const auto& rec : tr.records) {
        const double tau = Te - rec.t;
        if (tau < 100.0 * rec.dt) continue;
        const double bound = std::pow((1.0 - q) * tau, ex.alpha);
        const double margin = (rec.norm_Linf - bound) / bound;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_t = rec.t;
            rep.worst_r = 0.0;
        }
    }
    rep.pass = rep.worst_margin >= -rep.tolerance;
    return rep;
}

CheckReport check_positivity(const Trajectory& tr) {
    CheckReport rep;
    rep.name = "positivity";
    rep.tolerance = 0.0;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto& g = tr.grid;
    for (const auto& snap : tr.snapshots) {
        if (!(snap.t > 0.0) || !(snap.t < tr.T_e_est - 10.0 * snap.dt))
            continue;
        // interior nodes: boundary excluded under DirichletZero
        for (std::size_t i = 0; i + 1 < snap.values.size(); ++i) {
            const double v = snap.values[i];
            if (v < rep.worst_margin) {
                rep.worst_margin = v;
                rep.worst_t = snap.t;
                rep.worst_r = g.nodes[i];
            }
        }
    }
    // strict positivity: any zero interior value fails
    rep.pass = rep.worst_margin > 0.0;
    return rep;
}

CheckReport check_dt_bound(const Trajectory& tr, const Params& p) {
    CheckReport rep;
    rep.name = "dt_bound";
    rep.tolerance = tr.config.newton_tol;
    rep.note = "t = 0 excluded (bound degenerates there)";
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto& g = tr.grid;
    for (std::size_t k = 0; k + 1 < tr.snapshots.size(); ++k) {
        const auto& a = tr.snapshots[k];
        const auto& b = tr.snapshots[k + 1];
        if (!(a.t > 0.0)) continue;
        const double dt = b.t - a.t;
        if (!(dt > 0.0)) continue;
        const double coef = 1.0 / ((1.0 - p.m) * b.t);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const double quotient = (b.values[i] - a.values[i]) / dt;
            const double margin = b.values[i] * coef - quotient;
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_t = b.t;
                rep.worst_r = g.nodes[i];
            }
        }
    }
    rep.pass = rep.worst_margin >= -rep.tolerance;
    return rep;
}

double barrier_supersolution_residual(double kappa, double r,
                                      const DerivedExponents& ex) {
    const double m = ex.m, q = ex.q;
    const double ks_pow = std::pow(ex.kappa_star, q - m);
    return std::pow(kappa, m) * (std::pow(kappa, q - m) - ks_pow) *
           std::pow(r, -2.0 * q / (q - m));
}

double barrier_operator_value(double kappa, double r, const Params& p,
                              const DerivedExponents& ex) {
    // -lap(Sigma^m) + Sigma^q for Sigma = kappa r^{-a}, a = 2/(q-m):
    //   Sigma^m = kappa^m r^{-am};  lap = am(am + 2 - N) kappa^m r^{-am-2}
    const double m = p.m, q = p.q, N = p.N;
    const double am = ex.decay * m;
    const double lap = am * (am + 2.0 - N) * std::pow(kappa, m) *
                       std::pow(r, -(am + 2.0));
    return -lap + std::pow(kappa, q) * std::pow(r, -ex.decay * q);
}

} // namespace fdabs
