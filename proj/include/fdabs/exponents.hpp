#pragma once

#include <cmath>

#include "fdabs/errors.hpp"

namespace fdabs {

/// Norm order r in [1, inf]. The infinite order is a distinct token rather
/// than a large float, so rate(inf) == alpha holds exactly.
struct NormOrder {
    double value = 1.0;
    bool is_inf = false;

    static NormOrder finite(double r) { return {r, false}; }
    static NormOrder inf() { return {0.0, true}; }

    bool operator==(const NormOrder&) const = default;
};

/// Problem parameters for the fast-diffusion/strong-absorption regime
///   (N-2)+/N < m < q < 1.
/// N is accepted as any real >= 1; integer N is the standard usage.
struct Params {
    double N = 1.0;
    double m = 0.5;
    double q = 0.75;
};

/// All closed-form exponents attached to one Params.
struct DerivedExponents {
    double alpha;       // 1/(1-q), time exponent
    double beta;        // (q-m)/(2(1-q)), space exponent
    double gamma;       // energy-ODE exponent, in (0,1)
    double gamma_complement;  // 1 - gamma evaluated without cancellation;
                              // 1/gamma_complement is the stable form of
                              // 1/(1-gamma) even as q -> 1
    double theta;       // interpolation exponent, in (0,1)
    double kappa_star;  // barrier constant (2m(m+q)/(q-m)^2)^(1/(q-m))
    double decay;       // spatial decay exponent 2/(q-m)

    double N, m, q;     // provenance

    /// Extinction-rate exponent alpha - N*beta/r of the L^r norm.
    double rate(NormOrder r) const {
        if (r.is_inf) return alpha;
        return alpha - N * beta / r.value;
    }
};

/// Validates the admissibility window. Throws Error with code
/// order_violation or sobolev_violation naming the failed constraint.
Params validate_params(double N, double m, double q);

/// Computes every derived exponent in closed form. Requires valid Params;
/// never divides by zero under the Params invariants.
DerivedExponents derive(const Params& p);

/// Surface measure |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2), real N >= 1.
double unit_sphere_area(double N);

} // namespace fdabs
