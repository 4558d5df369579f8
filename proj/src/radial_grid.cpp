#include "fdabs/radial_grid.hpp"

#include <algorithm>
#include <cmath>

namespace fdabs {

RadialGrid make_uniform_grid(const Params& p, double R_max, std::size_t M) {
    if (!(R_max > 0.0) || !std::isfinite(R_max)) {
        raise(Errc::invalid_domain, "R_max must be positive and finite");
    }
    if (M < 16) {
        raise(Errc::invalid_resolution, "M must be at least 16");
    }
    RadialGrid g;
    g.N = p.N;
    g.R_max = R_max;
    g.M = M;
    g.h = R_max / static_cast<double>(M);
    g.surface = unit_sphere_area(p.N);

    g.nodes.resize(M + 1);
    g.quad_weights.resize(M + 1);
    g.lap_face.resize(M);
    g.lap_cell.resize(M + 1);

    const double N = p.N;
    for (std::size_t i = 0; i <= M; ++i) {
        g.nodes[i] = static_cast<double>(i) * g.h;
    }
    g.nodes[M] = R_max;  // exact right endpoint

    // Dual cells [r_i - h/2, r_i + h/2] clamped to [0, R_max]; the measure
    // int r^{N-1} dr is exact, so the weights sum to |B_R| to rounding.
    for (std::size_t i = 0; i <= M; ++i) {
        const double lo = std::max(g.nodes[i] - 0.5 * g.h, 0.0);
        const double hi = std::min(g.nodes[i] + 0.5 * g.h, R_max);
        const double cell = (std::pow(hi, N) - std::pow(lo, N)) / N;
        g.lap_cell[i] = cell;
        g.quad_weights[i] = g.surface * cell;
    }
    for (std::size_t i = 0; i < M; ++i) {
        const double rf = (static_cast<double>(i) + 0.5) * g.h;
        g.lap_face[i] = std::pow(rf, N - 1.0) / g.h;
    }
    return g;
}

} // namespace fdabs
