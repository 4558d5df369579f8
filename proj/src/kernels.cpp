#include "fdabs/kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace fdabs::kernels {

namespace {

std::atomic<Backend> g_backend{Backend::Parallel};

inline double spow(double x, double p) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(x), p), x);
}

// |w|^{p-1} for p > 1, taken as 0 at w = 0 (the limit). `mag` is |w|^p.
inline double abs_pow_minus1(double aw, double mag) {
    if (aw < 1e-300) return 0.0;
    return mag / aw;
}

template <typename BlockFn>
double blocked_reduce(std::size_t n, bool parallel, BlockFn&& fn) {
    const std::size_t nb = (n + reduce_block - 1) / reduce_block;
    std::vector<double> partial(nb);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long b = 0; b < static_cast<long>(nb); ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * reduce_block;
            const std::size_t hi = std::min(n, lo + reduce_block);
            partial[static_cast<std::size_t>(b)] = fn(lo, hi);
        }
    } else {
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t lo = b * reduce_block;
            const std::size_t hi = std::min(n, lo + reduce_block);
            partial[b] = fn(lo, hi);
        }
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

inline bool run_parallel(std::size_t n) {
#ifdef _OPENMP
    return g_backend.load(std::memory_order_relaxed) == Backend::Parallel &&
           n >= parallel_grain;
#else
    (void)n;
    return false;
#endif
}

} // namespace

Backend backend() noexcept {
    return g_backend.load(std::memory_order_relaxed);
}

void set_backend(Backend b) noexcept {
    g_backend.store(b, std::memory_order_relaxed);
}

void signed_pow(std::span<const double> src, double p, std::span<double> dst) {
    const long n = static_cast<long>(src.size());
    if (run_parallel(src.size())) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) dst[i] = spow(src[i], p);
    } else {
        for (long i = 0; i < n; ++i) dst[i] = spow(src[i], p);
    }
}

double weighted_pow_sum(std::span<const double> w, std::span<const double> u,
                        double p) {
    return blocked_reduce(u.size(), run_parallel(u.size()),
                          [&](std::size_t lo, std::size_t hi) {
                              double s = 0.0;
                              for (std::size_t i = lo; i < hi; ++i)
                                  s += w[i] * spow(u[i], p);
                              return s;
                          });
}

double weighted_sum(std::span<const double> w, std::span<const double> u) {
    return blocked_reduce(u.size(), run_parallel(u.size()),
                          [&](std::size_t lo, std::size_t hi) {
                              double s = 0.0;
                              for (std::size_t i = lo; i < hi; ++i)
                                  s += w[i] * u[i];
                              return s;
                          });
}

double weighted_square_sum(std::span<const double> w,
                           std::span<const double> u) {
    return blocked_reduce(u.size(), run_parallel(u.size()),
                          [&](std::size_t lo, std::size_t hi) {
                              double s = 0.0;
                              for (std::size_t i = lo; i < hi; ++i)
                                  s += w[i] * u[i] * u[i];
                              return s;
                          });
}

double weighted_product_sum(std::span<const double> w,
                            std::span<const double> a,
                            std::span<const double> b) {
    return blocked_reduce(a.size(), run_parallel(a.size()),
                          [&](std::size_t lo, std::size_t hi) {
                              double s = 0.0;
                              for (std::size_t i = lo; i < hi; ++i)
                                  s += w[i] * a[i] * b[i];
                              return s;
                          });
}

double max_value(std::span<const double> v) {
    const long n = static_cast<long>(v.size());
    double best = -HUGE_VAL;
    if (run_parallel(v.size())) {
#pragma omp parallel for schedule(static) reduction(max : best)
        for (long i = 0; i < n; ++i) best = std::max(best, v[i]);
    } else {
        for (long i = 0; i < n; ++i) best = std::max(best, v[i]);
    }
    return best;
}

double min_value(std::span<const double> v) {
    const long n = static_cast<long>(v.size());
    double best = HUGE_VAL;
    if (run_parallel(v.size())) {
#pragma omp parallel for schedule(static) reduction(min : best)
        for (long i = 0; i < n; ++i) best = std::min(best, v[i]);
    } else {
        for (long i = 0; i < n; ++i) best = std::min(best, v[i]);
    }
    return best;
}

double max_abs(std::span<const double> v) {
    const long n = static_cast<long>(v.size());
    double best = 0.0;
    if (run_parallel(v.size())) {
#pragma omp parallel for schedule(static) reduction(max : best)
        for (long i = 0; i < n; ++i) best = std::max(best, std::fabs(v[i]));
    } else {
        for (long i = 0; i < n; ++i) best = std::max(best, std::fabs(v[i]));
    }
    return best;
}

namespace serial_ref {

double weighted_pow_sum(std::span<const double> w, std::span<const double> u,
                        double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * spow(u[i], p);
    return s;
}

double weighted_sum(std::span<const double> w, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i];
    return s;
}

double max_value(std::span<const double> v) {
    double best = -HUGE_VAL;
    for (double x : v) best = std::max(best, x);
    return best;
}

void signed_pow(std::span<const double> src, double p, std::span<double> dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = spow(src[i], p);
}

} // namespace serial_ref

void newton_residual(std::span<const double> w, std::span<const double> b,
                     const LaplacianCoeffs& lc, double dt, double inv_m,
                     double q_over_m, std::span<double> u,
                     std::span<double> phi, std::span<double> F) {
    const long M = static_cast<long>(w.size()) - 1;
    const auto body = [&](long i) {
        const double wi = w[i];
        const double ui = spow(wi, inv_m);
        const double ph = spow(wi, q_over_m);
        u[i] = ui;
        phi[i] = ph;
        double lap;
        if (i == 0) {
            lap = lc.face[0] * (w[1] - w[0]) / lc.cell[0];
        } else {
            lap = (lc.face[i] * (w[i + 1] - wi) -
                   lc.face[i - 1] * (wi - w[i - 1])) /
                  lc.cell[i];
        }
        F[i] = ui - dt * lap + dt * ph - b[i];
    };
    if (run_parallel(w.size())) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < M; ++i) body(i);
    } else {
        for (long i = 0; i < M; ++i) body(i);
    }
    u[M] = spow(w[M], inv_m);
    phi[M] = spow(w[M], q_over_m);
    F[M] = 0.0;
}

void newton_jacobian(std::span<const double> w, const LaplacianCoeffs& lc,
                     double dt, double inv_m, double q_over_m,
                     std::span<double> sub, std::span<double> diag,
                     std::span<double> sup) {
    const long M = static_cast<long>(w.size()) - 1;
    const auto body = [&](long i) {
        const double aw = std::fabs(w[i]);
        const double du = inv_m * abs_pow_minus1(aw, std::pow(aw, inv_m));
        const double dp = q_over_m * abs_pow_minus1(aw, std::pow(aw, q_over_m));
        if (i == 0) {
            const double c = lc.face[0] / lc.cell[0];
            diag[0] = du + dt * c + dt * dp;
            sup[0] = -dt * c;
            sub[0] = 0.0;
        } else {
            const double cr = lc.face[i] / lc.cell[i];
            const double cl = lc.face[i - 1] / lc.cell[i];
            diag[i] = du + dt * (cr + cl) + dt * dp;
            sub[i] = -dt * cl;
            sup[i] = -dt * cr;
        }
    };
    if (run_parallel(w.size())) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < M; ++i) body(i);
    } else {
        for (long i = 0; i < M; ++i) body(i);
    }
    sub[M] = 0.0;
    diag[M] = 1.0;
    sup[M] = 0.0;
}

void thomas_solve(std::span<double> sub, std::span<double> diag,
                  std::span<double> sup, std::span<double> rhs,
                  std::span<double> x) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    }
}

} // namespace fdabs::kernels
