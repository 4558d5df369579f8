#include "doctest.h"

#include <cmath>
#include <tuple>

#include "fdabs/diagnostics.hpp"

using namespace fdabs;

namespace {

Trajectory synthetic_trajectory(const Params& p, double R, std::size_t M) {
    Trajectory tr;
    tr.params = p;
    tr.grid = make_uniform_grid(p, R, M);
    tr.extinguished = true;
    return tr;
}

State capped_state(const RadialGrid& g, double A, double decay) {
    State s;
    s.values.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double r = g.nodes[i];
        s.values[i] = A * (r <= 1.0 ? 1.0 : std::pow(r, -decay));
    }
    return s;
}

} // namespace

TEST_CASE("fit_kappa0 on canonical profiles") {
    const Params p{1, 0.5, 0.75};
    const DerivedExponents ex = derive(p);
    const auto g = make_uniform_grid(p, 10.0, 160);  // node lands on r = 1

    CHECK(fit_kappa0(capped_state(g, 1.0, ex.decay), g, ex) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit_kappa0(capped_state(g, 2.0, ex.decay), g, ex) ==
          doctest::Approx(2.0).epsilon(1e-12));

    State ind;
    ind.values.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        ind.values[i] = g.nodes[i] <= 1.0 ? 1.0 : 0.0;
    }
    CHECK(fit_kappa0(ind, g, ex) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("barrier threshold value at r = 2 with unit constant") {
    CHECK(1.0 * std::pow(2.0, -8.0) == doctest::Approx(0.00390625));
}

TEST_CASE("check_barrier verdicts on constructed snapshots") {
    const Params p{1, 0.5, 0.75};
    const DerivedExponents ex = derive(p);
    auto tr = synthetic_trajectory(p, 10.0, 64);
    const auto spec = make_barrier_spec(1.0, ex);
    CHECK(spec.kappa_eff == doctest::Approx(160000.0));

    // a state well below the barrier
    Snapshot ok;
    ok.t = 0.5;
    ok.dt = 1e-3;
    ok.values = capped_state(tr.grid, 1.0, ex.decay).values;
    tr.snapshots.push_back(ok);
    CHECK(check_barrier(tr, spec).pass);

    // violate at one node
    Snapshot bad = ok;
    bad.t = 0.7;
    const std::size_t j = 40;
    bad.values[j] =
        2.0 * spec.kappa_eff * std::pow(tr.grid.nodes[j], -spec.decay);
    tr.snapshots.push_back(bad);
    const auto rep = check_barrier(tr, spec);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_t == doctest::Approx(0.7));
    CHECK(rep.worst_r == doctest::Approx(tr.grid.nodes[j]));
    CHECK(rep.worst_margin == doctest::Approx(-1.0));  // u = 2 bound
}

TEST_CASE("check_barrier passes a zero state with full margin") {
    const Params p{1, 0.5, 0.75};
    const DerivedExponents ex = derive(p);
    auto tr = synthetic_trajectory(p, 10.0, 64);
    Snapshot z;
    z.t = 0.1;
    z.dt = 1e-3;
    z.values.assign(tr.grid.nodes.size(), 0.0);
    tr.snapshots.push_back(z);
    const auto rep = check_barrier(tr, make_barrier_spec(1.0, ex));
    CHECK(rep.pass);
    CHECK(rep.worst_margin == doctest::Approx(1.0));
}

TEST_CASE("check_linf_lower saturates exactly on the flat law") {
    const Params p{1, 0.5, 0.75};
    const DerivedExponents ex = derive(p);

    // threshold at T_e - t = 1: [(1-q)]^{1/(1-q)} = 0.25^4
    CHECK(std::pow((1.0 - p.q) * 1.0, ex.alpha) ==
          doctest::Approx(0.00390625));

    auto tr = synthetic_trajectory(p, 10.0, 64);
    tr.T_e_est = 2.0;
    for (int k = 0; k < 100; ++k) {
        StepRecord rec;
        rec.t = 0.01 * k;
        rec.dt = 1e-4;
        const double tau = tr.T_e_est - rec.t;
        rec.norm_Linf = 2.0 * std::pow((1.0 - p.q) * tau, ex.alpha);
        tr.records.push_back(rec);
    }
    CHECK(check_linf_lower(tr, ex).pass);

    for (auto& rec : tr.records) rec.norm_Linf *= 0.25;  // 0.5 * threshold
    const auto rep = check_linf_lower(tr, ex);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_margin == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("check_positivity window semantics") {
    const Params p{1, 0.5, 0.75};
    auto tr = synthetic_trajectory(p, 5.0, 64);
    tr.T_e_est = 1.0;

    Snapshot in_window;
    in_window.t = 0.5;
    in_window.dt = 1e-3;
    in_window.values.assign(tr.grid.nodes.size(), 1e-6);
    in_window.values.back() = 0.0;  // boundary may be zero
    tr.snapshots.push_back(in_window);
    CHECK(check_positivity(tr).pass);

    // a zero state past the window is exempt
    Snapshot late;
    late.t = 0.9999;
    late.dt = 0.01;  // T_e_est - 10 dt = 0.8999 < t
    late.values.assign(tr.grid.nodes.size(), 0.0);
    tr.snapshots.push_back(late);
    CHECK(check_positivity(tr).pass);

    // an interior zero inside the window fails
    Snapshot bad = in_window;
    bad.t = 0.6;
    bad.values[3] = 0.0;
    tr.snapshots.push_back(bad);
    CHECK_FALSE(check_positivity(tr).pass);
}

TEST_CASE("check_dt_bound flags quotients above the lemma bound") {
    const Params p{1, 0.5, 0.75};
    auto tr = synthetic_trajectory(p, 5.0, 32);
    tr.config.newton_tol = 1e-10;
    tr.T_e_est = 10.0;

    // decaying pair: quotient negative, bound positive
    Snapshot a, b;
    a.t = 1.0;
    a.dt = 0.1;
    a.values.assign(tr.grid.nodes.size(), 0.5);
    b = a;
    b.t = 1.1;
    b.values.assign(tr.grid.nodes.size(), 0.45);
    tr.snapshots = {a, b};
    const auto ok = check_dt_bound(tr, p);
    CHECK(ok.pass);
    CHECK(ok.note.find("t = 0 excluded") != std::string::npos);

    // growing pair violating u/(1-m)t
    Snapshot c = b;
    c.t = 1.2;
    c.values.assign(tr.grid.nodes.size(), 0.45 * 1.5);
    tr.snapshots = {b, c};
    // quotient = 0.45*0.5/0.1 = 2.25 > 0.675/(0.5*1.2) = 1.125
    CHECK_FALSE(check_dt_bound(tr, p).pass);
}

TEST_CASE("barrier supersolution residual is nonnegative above kappa_star") {
    const std::tuple<double, double, double> triples[] = {
        {1.0, 0.5, 0.75}, {3.0, 0.45, 0.7}, {2.0, 0.6, 0.8}};
    for (const auto& [N, m, q] : triples) {
        const Params p{N, m, q};
        const DerivedExponents ex = derive(p);
        for (double r : {0.5, 1.0, 3.0, 10.0, 50.0}) {
            // closed-form lower bound of the operator value
            CHECK(barrier_supersolution_residual(ex.kappa_star, r, ex) ==
                  doctest::Approx(0.0));
            CHECK(barrier_supersolution_residual(2.0 * ex.kappa_star, r, ex) >=
                  0.0);
            // the full operator dominates the closed-form bound (N >= 1)
            for (double kappa : {ex.kappa_star, 2.0 * ex.kappa_star}) {
                CHECK(barrier_operator_value(kappa, r, p, ex) >=
                      barrier_supersolution_residual(kappa, r, ex) -
                          1e-12 * std::fabs(barrier_operator_value(kappa, r, p,
                                                                   ex)));
            }
            // strictly below kappa_star the residual goes negative
            CHECK(barrier_supersolution_residual(0.5 * ex.kappa_star, r, ex) <
                  0.0);
        }
    }
}

TEST_CASE("checks are pure functions of the trajectory") {
    const Params p{1, 0.5, 0.75};
    const DerivedExponents ex = derive(p);
    auto tr = synthetic_trajectory(p, 10.0, 64);
    tr.T_e_est = 1.0;
    Snapshot s;
    s.t = 0.4;
    s.dt = 1e-3;
    s.values = capped_state(tr.grid, 0.5, ex.decay).values;
    tr.snapshots.push_back(s);
    for (int k = 0; k < 50; ++k) {
        StepRecord rec;
        rec.t = 0.01 * k;
        rec.dt = 1e-4;
        rec.norm_Linf = std::pow((1.0 - p.q) * (1.0 - rec.t), ex.alpha);
        tr.records.push_back(rec);
    }
    const auto b1 = check_barrier(tr, make_barrier_spec(1.0, ex));
    const auto b2 = check_barrier(tr, make_barrier_spec(1.0, ex));
    CHECK(b1.pass == b2.pass);
    CHECK(b1.worst_margin == b2.worst_margin);
    const auto l1 = check_linf_lower(tr, ex);
    const auto l2 = check_linf_lower(tr, ex);
    CHECK(l1.worst_margin == l2.worst_margin);
}
