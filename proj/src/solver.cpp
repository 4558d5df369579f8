#include "fdabs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "fdabs/kernels.hpp"

namespace fdabs {

namespace {

using kernels::max_abs;
using kernels::max_value;
using kernels::weighted_product_sum;
using kernels::weighted_square_sum;
using kernels::weighted_sum;

constexpr int max_line_search = 15;

/// Backward-Euler stepper in the transformed variable w = u^m. Buffers are
/// reused across steps; u/phi always mirror the current w.
class Stepper {
public:
    Stepper(const RadialGrid& g, const Params& p, const SolverConfig& c)
        : grid_(g), params_(p), config_(c), lc_(g.laplacian()),
          inv_m_(1.0 / p.m), q_over_m_(p.q / p.m) {
        const std::size_t n = g.M + 1;
        w_.resize(n);
        u_.resize(n);
        phi_.resize(n);
        F_.resize(n);
        w_try_.resize(n);
        u_try_.resize(n);
        phi_try_.resize(n);
        F_try_.resize(n);
        delta_.resize(n);
        sub_.resize(n);
        diag_.resize(n);
        sup_.resize(n);
        rhs_.resize(n);
        w_bc_ = (c.boundary == BoundaryKind::BarrierClamp)
                    ? std::pow(std::max(c.boundary_value, 0.0), p.m)
                    : 0.0;
    }

    void load(std::span<const double> u_values) {
        kernels::signed_pow(u_values, params_.m, std::span(w_));
        std::copy(u_values.begin(), u_values.end(), u_.begin());
        w_[grid_.M] = w_bc_;
        u_[grid_.M] = config_.boundary == BoundaryKind::BarrierClamp
                          ? std::max(config_.boundary_value, 0.0)
                          : 0.0;
    }

    /// One implicit step from the loaded state. On success the internal
    /// w/u/phi hold the new state. Throws newton_divergence.
    int advance(std::span<const double> b, double dt) {
        const double sup_b = std::max(max_value(b), 0.0);
        const double tol = config_.newton_tol * sup_b;

        double res = eval(w_, u_, phi_, F_, b, dt);
        int it = 0;
        while (res > tol) {
            if (it >= config_.newton_max_iter) {
                raise(Errc::newton_divergence,
                      "residual " + std::to_string(res) + " above tolerance " +
                          std::to_string(tol) + " after " +
                          std::to_string(it) + " iterations");
            }
            kernels::newton_jacobian(std::span(w_), lc_, dt, inv_m_, q_over_m_,
                                     std::span(sub_), std::span(diag_),
                                     std::span(sup_));
            for (std::size_t i = 0; i < F_.size(); ++i) rhs_[i] = -F_[i];
            kernels::thomas_solve(std::span(sub_), std::span(diag_),
                                  std::span(sup_), std::span(rhs_),
                                  std::span(delta_));
            double lam = 1.0;
            double res_try = res;
            for (int ls = 0; ls < max_line_search; ++ls) {
                for (std::size_t i = 0; i < w_.size(); ++i)
                    w_try_[i] = w_[i] + lam * delta_[i];
                w_try_[grid_.M] = w_bc_;
                res_try = eval(w_try_, u_try_, phi_try_, F_try_, b, dt);
                if (res_try < res) break;
                lam *= 0.5;
            }
            if (!(res_try < res)) {
                raise(Errc::newton_divergence,
                      "line search failed to reduce the residual " +
                          std::to_string(res));
            }
            std::swap(w_, w_try_);
            std::swap(u_, u_try_);
            std::swap(phi_, phi_try_);
            std::swap(F_, F_try_);
            res = res_try;
            ++it;
        }
        last_residual_ = res;
        return it;
    }

    /// Clips negatives to zero. Returns the removed weighted mass; throws
    /// newton_divergence if any clipped magnitude exceeds newton_tol.
    double clip() {
        double removed = 0.0;
        double worst = 0.0;
        for (std::size_t i = 0; i < u_.size(); ++i) {
            if (u_[i] < 0.0) {
                worst = std::max(worst, -u_[i]);
                removed += grid_.quad_weights[i] * (-u_[i]);
                u_[i] = 0.0;
                w_[i] = 0.0;
                phi_[i] = 0.0;
            }
        }
        if (worst > config_.newton_tol) {
            raise(Errc::newton_divergence,
                  "negative value " + std::to_string(worst) +
                      " beyond the clipping budget");
        }
        return removed;
    }

    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& w() const { return w_; }
    const std::vector<double>& phi() const { return phi_; }

    /// Signed diffusive flux through the outer face (positive = outflow).
    double boundary_outflow() const {
        return -grid_.surface * lc_.face[grid_.M - 1] *
               (w_[grid_.M] - w_[grid_.M - 1]);
    }

    /// int |d_r w|^2 r^{N-1} dS with centered differences of the current w.
    double dissipation_centered() {
        const std::size_t n = w_.size();
        auto& grad = rhs_;  // scratch
        grad[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i)
            grad[i] = (w_[i + 1] - w_[i - 1]) / (2.0 * grid_.h);
        grad[n - 1] = (w_[n - 1] - w_[n - 2]) / grid_.h;
        return weighted_square_sum(std::span(grid_.quad_weights),
                                   std::span(grad));
    }

    double last_residual() const { return last_residual_; }

private:
    double eval(std::vector<double>& w, std::vector<double>& u,
                std::vector<double>& phi, std::vector<double>& F,
                std::span<const double> b, double dt) {
        kernels::newton_residual(std::span(w), b, lc_, dt, inv_m_, q_over_m_,
                                 std::span(u), std::span(phi), std::span(F));
        return max_abs(std::span(F));
    }

    const RadialGrid& grid_;
    const Params& params_;
    const SolverConfig& config_;
    kernels::LaplacianCoeffs lc_;
    double inv_m_, q_over_m_, w_bc_ = 0.0;
    double last_residual_ = 0.0;

    std::vector<double> w_, u_, phi_, F_;
    std::vector<double> w_try_, u_try_, phi_try_, F_try_;
    std::vector<double> delta_, sub_, diag_, sup_, rhs_;
};

double flat_ode_lifetime(double sup, double q) {
    return std::pow(sup, 1.0 - q) / (1.0 - q);
}

/// Linear extrapolation of z = ||u||_inf^{1-q} over the trailing records;
/// exact for spatially flat solutions, and first-order accurate whenever
/// the decay approaches the self-similar power law. Returns nullopt when
/// the tail is too short or not decreasing.
std::optional<double> tail_extrapolated_Te(const std::vector<StepRecord>& recs,
                                           double q) {
    if (recs.size() < 12) return std::nullopt;
    const double z_last = std::pow(recs.back().norm_Linf, 1.0 - q);
    if (!(z_last > 0.0)) return std::nullopt;
    std::size_t lo = recs.size();
    while (lo > 0 &&
           std::pow(recs[lo - 1].norm_Linf, 1.0 - q) <= 8.0 * z_last) {
        --lo;
    }
    const std::size_t n = recs.size() - lo;
    if (n < 10) return std::nullopt;
    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (std::size_t i = lo; i < recs.size(); ++i) {
        const double t = recs[i].t;
        const double z = std::pow(recs[i].norm_Linf, 1.0 - q);
        st += t;
        sz += z;
        stt += t * t;
        stz += t * z;
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * stt - st * st;
    if (denom <= 0.0) return std::nullopt;
    const double slope = (dn * stz - st * sz) / denom;
    const double intercept = (sz - slope * st) / dn;
    if (!(slope < 0.0)) return std::nullopt;
    const double Te = -intercept / slope;
    if (!(Te > recs.back().t)) return std::nullopt;
    return Te;
}

} // namespace

StepResult step(const State& s, const RadialGrid& g, const Params& p,
                const SolverConfig& c, double dt) {
    Stepper st(g, p, c);
    st.load(std::span(s.values));
    StepResult out;
    out.newton_iters = st.advance(std::span(s.values), dt);
    st.clip();
    out.state.t = s.t + dt;
    out.state.values = st.u();
    out.residual = st.last_residual();
    return out;
}

Trajectory run(const State& u0, const RadialGrid& g, const Params& p,
               const SolverConfig& c) {
    Trajectory tr;
    tr.params = p;
    tr.grid = g;
    tr.config = c;

    const auto qw = std::span(g.quad_weights);
    const double sup0 = max_value(std::span(u0.values));
    if (!(sup0 > 0.0)) {
        raise(Errc::validation_error,
              "initial datum must be non-negative and not identically zero");
    }
    tr.initial_L1 = weighted_sum(qw, std::span(u0.values));
    const double apriori = flat_ode_lifetime(sup0, p.q);

    Stepper st(g, p, c);
    st.load(std::span(u0.values));

    std::vector<double> b = st.u();  // u^n (with the boundary value applied)
    double t = u0.t;
    double X_prev = weighted_product_sum(qw, std::span(st.u()), std::span(st.w()));
    double L1_prev = weighted_sum(qw, std::span(st.u()));

    double dt_ctrl = std::clamp(c.dt_init, c.dt_min, c.dt_max);
    int consecutive = 0;
    std::size_t nstep = 0;

    while (true) {
        const double sup = max_value(std::span(b));
        if (sup <= c.eps_ext) {
            tr.extinguished = true;
            tr.t_stop = t;
            tr.sup_stop = sup;
            break;
        }
        if (t > 1.1 * apriori) {
            raise(Errc::non_extinction,
                  "t = " + std::to_string(t) +
                      " exceeds the a-priori extinction bound " +
                      std::to_string(apriori) + " by more than 10%");
        }
        const double tau_proxy = flat_ode_lifetime(sup, p.q);
        double dt = std::min({dt_ctrl, c.remaining_frac * tau_proxy,
                              0.1 * tau_proxy});
        dt = std::max(dt, c.dt_min);

        int iters = 0;
        try {
            iters = st.advance(std::span(b), dt);
        } catch (const Error& e) {
            if (e.code() != Errc::newton_divergence) throw;
            if (dt <= c.dt_min * (1.0 + 1e-12)) {
                raise(Errc::step_too_small,
                      "Newton failed at dt_min = " + std::to_string(c.dt_min));
            }
            dt_ctrl = std::max(0.5 * dt, c.dt_min);
            consecutive = 0;
            st.load(std::span(b));  // reset the Newton state
            continue;
        }
        tr.clipped_mass += st.clip();

        t += dt;
        ++nstep;
        ++consecutive;
        if (consecutive >= c.growth_every) {
            dt_ctrl = std::min(dt_ctrl * c.growth_factor, c.dt_max);
            consecutive = 0;
        }

        StepRecord rec;
        rec.t = t;
        rec.dt = dt;
        rec.newton_iters = iters;
        const auto u = std::span(st.u());
        const auto wv = std::span(st.w());
        const auto phi = std::span(st.phi());
        rec.norm_L1 = weighted_sum(qw, u);
        const double X = weighted_product_sum(qw, u, wv);  // u^{m+1}
        rec.norm_Lm1 = std::pow(X, 1.0 / (p.m + 1.0));
        rec.norm_L2 = std::sqrt(weighted_square_sum(qw, u));
        rec.norm_Linf = max_value(u);

        const double Y = weighted_product_sum(qw, wv, phi);  // u^{m+q}
        const double D = st.dissipation_centered();
        rec.energy_resid =
            std::fabs((X - X_prev) / ((p.m + 1.0) * dt) + D + Y);
        rec.energy_tol =
            1e-3 * std::max(X_prev / dt * 1e-2, D + Y);

        const double Yq = weighted_sum(qw, phi);  // int u^q
        rec.absorbed = dt * Yq;
        rec.boundary_outflow = dt * st.boundary_outflow();
        rec.mass_defect = std::fabs(L1_prev - rec.norm_L1 - rec.absorbed -
                                    rec.boundary_outflow);

        X_prev = X;
        L1_prev = rec.norm_L1;
        tr.records.push_back(rec);

        if ((nstep - 1) % c.snapshot_stride == 0) {
            tr.snapshots.push_back({t, dt, st.u()});
        }
        b = st.u();
    }

    if (tr.extinguished && !tr.records.empty()) {
        const auto& last = tr.records.back();
        if (tr.snapshots.empty() || tr.snapshots.back().t != last.t) {
            tr.snapshots.push_back({last.t, last.dt, b});
        }
        tr.T_e_raw = tr.t_stop + flat_ode_lifetime(c.eps_ext, p.q);
        const auto extrap = tail_extrapolated_Te(tr.records, p.q);
        tr.T_e_est = extrap.value_or(
            tr.t_stop + flat_ode_lifetime(tr.sup_stop, p.q));
    }

    tr.clipping_flagged = tr.clipped_mass > 1e-6 * tr.initial_L1;
    return tr;
}

double estimate_extinction(const Trajectory& tr) {
    if (!tr.extinguished) {
        raise(Errc::not_extinguished,
              "trajectory never reached the extinction threshold");
    }
    return tr.T_e_est;
}

double richardson_extinction(const State& u0, const RadialGrid& g,
                             const Params& p, const SolverConfig& c) {
    const double coarse = estimate_extinction(run(u0, g, p, c));
    SolverConfig half = c;
    half.dt_init *= 0.5;
    half.dt_min *= 0.5;
    half.dt_max *= 0.5;
    half.remaining_frac *= 0.5;
    const double fine = estimate_extinction(run(u0, g, p, half));
    return 2.0 * fine - coarse;
}

} // namespace fdabs
