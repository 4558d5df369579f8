#include "fdabs/norms.hpp"

#include <cmath>
#include <vector>

#include "fdabs/kernels.hpp"

namespace fdabs {

double lr_norm(std::span<const double> values, const RadialGrid& g,
               NormOrder r) {
    if (r.is_inf) {
        return kernels::max_value(values);
    }
    const double s =
        kernels::weighted_pow_sum(std::span(g.quad_weights), values, r.value);
    return std::pow(s, 1.0 / r.value);
}

double lr_norm(const State& s, const RadialGrid& g, NormOrder r) {
    return lr_norm(std::span(s.values), g, r);
}

EnergyTerms energy_terms(const State& s, const RadialGrid& g,
                         const Params& p) {
    EnergyTerms e;
    const auto w = std::span(g.quad_weights);
    const auto u = std::span(s.values);
    e.X = kernels::weighted_pow_sum(w, u, p.m + 1.0);
    e.Y = kernels::weighted_pow_sum(w, u, p.m + p.q);

    // centered differences of u^m; zero slope at the origin by symmetry,
    // one-sided at R_max
    const std::size_t n = u.size();
    std::vector<double> um(n);
    kernels::signed_pow(u, p.m, std::span(um));
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        grad[i] = (um[i + 1] - um[i - 1]) / (2.0 * g.h);
    }
    if (n >= 2) grad[n - 1] = (um[n - 1] - um[n - 2]) / g.h;
    e.D = kernels::weighted_square_sum(w, std::span(grad));
    return e;
}

} // namespace fdabs
