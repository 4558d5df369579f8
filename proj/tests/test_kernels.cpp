#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fdabs/kernels.hpp"
#include "fdabs/radial_grid.hpp"

using namespace fdabs;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo = 0.0,
                               double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

struct BackendGuard {
    kernels::Backend saved = kernels::backend();
    ~BackendGuard() { kernels::set_backend(saved); }
};

} // namespace

TEST_CASE("blocked reductions agree with the plain serial reference") {
    const auto u = random_vec(100001, 11);
    const auto w = random_vec(100001, 12);
    const double a = kernels::weighted_pow_sum(w, u, 1.37);
    const double b = kernels::serial_ref::weighted_pow_sum(w, u, 1.37);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));

    const double s1 = kernels::weighted_sum(w, u);
    const double s2 = kernels::serial_ref::weighted_sum(w, u);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));

    CHECK(kernels::max_value(u) == kernels::serial_ref::max_value(u));
}

TEST_CASE("parallel and serial backends are bitwise identical") {
    BackendGuard guard;
    const auto u = random_vec(3 * kernels::parallel_grain + 17, 21, -1.0, 1.0);
    const auto w = random_vec(u.size(), 22);

    kernels::set_backend(kernels::Backend::Serial);
    const double ps = kernels::weighted_pow_sum(w, u, 1.5);
    const double ss = kernels::weighted_sum(w, u);
    const double qs = kernels::weighted_square_sum(w, u);
    std::vector<double> pow_s(u.size());
    kernels::signed_pow(u, 0.5, pow_s);

    kernels::set_backend(kernels::Backend::Parallel);
    const double pp = kernels::weighted_pow_sum(w, u, 1.5);
    const double sp = kernels::weighted_sum(w, u);
    const double qp = kernels::weighted_square_sum(w, u);
    std::vector<double> pow_p(u.size());
    kernels::signed_pow(u, 0.5, pow_p);

    CHECK(ps == pp);  // bitwise
    CHECK(ss == sp);
    CHECK(qs == qp);
    CHECK(pow_s == pow_p);
}

TEST_CASE("signed_pow extends powers oddly") {
    std::vector<double> src = {-4.0, -1.0, 0.0, 1.0, 4.0};
    std::vector<double> dst(src.size());
    kernels::signed_pow(src, 0.5, dst);
    CHECK(dst[0] == doctest::Approx(-2.0));
    CHECK(dst[1] == doctest::Approx(-1.0));
    CHECK(dst[2] == 0.0);
    CHECK(dst[3] == doctest::Approx(1.0));
    CHECK(dst[4] == doctest::Approx(2.0));
}

TEST_CASE("thomas_solve matches a dense elimination on random systems") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial) * 7;
        std::vector<double> sub(n, 0.0), diag(n), sup(n, 0.0), rhs(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) sub[i] = -unit(rng);
            if (i + 1 < n) sup[i] = -unit(rng);
            diag[i] = 2.5 + unit(rng);  // strictly dominant
            rhs[i] = unit(rng) - 0.5;
        }
        const auto sub0 = sub, diag0 = diag, sup0 = sup, rhs0 = rhs;
        kernels::thomas_solve(sub, diag, sup, rhs, x);
        // residual of the original system
        for (std::size_t i = 0; i < n; ++i) {
            double ax = diag0[i] * x[i];
            if (i > 0) ax += sub0[i] * x[i - 1];
            if (i + 1 < n) ax += sup0[i] * x[i + 1];
            CHECK(ax == doctest::Approx(rhs0[i]).epsilon(1e-11));
        }
    }
}

TEST_CASE("newton_jacobian is the derivative of newton_residual") {
    const Params p{3.0, 0.45, 0.7};
    const auto g = make_uniform_grid(p, 5.0, 32);
    const double dt = 1e-3, inv_m = 1.0 / p.m, q_over_m = p.q / p.m;
    const std::size_t n = g.M + 1;

    auto w = random_vec(n, 41, 0.05, 1.0);
    w[g.M] = 0.0;
    const auto b = random_vec(n, 42, 0.0, 1.0);

    std::vector<double> u(n), phi(n), F0(n), F1(n);
    kernels::newton_residual(w, b, g.laplacian(), dt, inv_m, q_over_m, u, phi,
                             F0);

    std::vector<double> sub(n), diag(n), sup(n);
    kernels::newton_jacobian(w, g.laplacian(), dt, inv_m, q_over_m, sub, diag,
                             sup);

    const double eps = 1e-7;
    for (std::size_t j : {std::size_t(0), std::size_t(1), std::size_t(13),
                          n - 3, n - 2}) {
        auto wp = w;
        wp[j] += eps;
        kernels::newton_residual(wp, b, g.laplacian(), dt, inv_m, q_over_m, u,
                                 phi, F1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double fd = (F1[i] - F0[i]) / eps;
            double an = 0.0;
            if (i == j) an = diag[i];
            else if (i + 1 == j) an = sup[i];
            else if (i == j + 1) an = sub[i];
            CHECK(fd == doctest::Approx(an).epsilon(5e-5).scale(1.0));
        }
    }
}
