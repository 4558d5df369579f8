#pragma once

#include <span>

#include "fdabs/radial_grid.hpp"

namespace fdabs {

/// Weighted L^r norm over the truncated domain:
/// finite r: (sum_i w_i u_i^r)^{1/r}; r = inf: max_i u_i.
double lr_norm(const State& s, const RadialGrid& g, NormOrder r);
double lr_norm(std::span<const double> values, const RadialGrid& g,
               NormOrder r);

/// The three energy-identity integrals of one state:
///   X = ||u||_{m+1}^{m+1},  Y = int u^{m+q},
///   D = int |d_r u^m|^2 r^{N-1} |S^{N-1}| with centered differences of u^m
/// (one-sided at r = R_max, zero slope at the origin by symmetry).
struct EnergyTerms {
    double X = 0.0;
    double D = 0.0;
    double Y = 0.0;
};

EnergyTerms energy_terms(const State& s, const RadialGrid& g, const Params& p);

} // namespace fdabs
