#pragma once

#include <vector>

#include "fdabs/exponents.hpp"
#include "fdabs/kernels.hpp"

namespace fdabs {

/// Uniform radial discretization of the ball of radius R_max in R^N.
/// Nodes r_i = i h, i = 0..M. Quadrature weights are exact cell measures
///   w_i = |S^{N-1}| * (r_{i+1/2}^N - r_{i-1/2}^N)/N
/// (clamped to [0, R_max]), so sum(w) equals the ball volume to machine
/// precision and the origin node carries exactly the half-cell volume.
struct RadialGrid {
    double N = 1.0;
    double R_max = 0.0;
    std::size_t M = 0;       // number of cells; M+1 nodes
    double h = 0.0;
    double surface = 0.0;    // |S^{N-1}|

    std::vector<double> nodes;        // size M+1
    std::vector<double> quad_weights; // size M+1, = surface * cell measure

    // discretization coefficients of the conservative radial Laplacian
    std::vector<double> lap_face;     // size M, r_{i+1/2}^{N-1}/h
    std::vector<double> lap_cell;     // size M+1, cell measure (no surface)

    kernels::LaplacianCoeffs laplacian() const {
        return {std::span(lap_face), std::span(lap_cell)};
    }
};

/// Solution samples at one time instant. values[i] = u(t, r_i) >= 0.
struct State {
    double t = 0.0;
    std::vector<double> values;
};

/// Builds the uniform grid. Throws invalid_resolution (M < 16) or
/// invalid_domain (R_max <= 0).
RadialGrid make_uniform_grid(const Params& p, double R_max, std::size_t M);

} // namespace fdabs
