#include "fdabs/exponents.hpp"

#include <cmath>
#include <sstream>

namespace fdabs {

namespace {

std::string triple(double N, double m, double q) {
    std::ostringstream os;
    os << "(N=" << N << ", m=" << m << ", q=" << q << ")";
    return os.str();
}

} // namespace

Params validate_params(double N, double m, double q) {
    if (!(N >= 1.0) || !std::isfinite(N) || !std::isfinite(m) ||
        !std::isfinite(q)) {
        raise(Errc::validation_error,
              "N must be a finite real >= 1 and m, q finite " + triple(N, m, q));
    }
    if (!(0.0 < m && m < q && q < 1.0)) {
        raise(Errc::order_violation,
              "need 0 < m < q < 1, got " + triple(N, m, q));
    }
    const double sobolev = std::max(N - 2.0, 0.0) / N;
    if (!(m > sobolev)) {
        raise(Errc::sobolev_violation,
              "need m > (N-2)+/N = " + std::to_string(sobolev) + ", got " +
                  triple(N, m, q));
    }
    return Params{N, m, q};
}

DerivedExponents derive(const Params& p) {
    const double N = p.N, m = p.m, q = p.q;
    DerivedExponents ex{};
    ex.N = N;
    ex.m = m;
    ex.q = q;
    ex.alpha = 1.0 / (1.0 - q);
    ex.beta = (q - m) / (2.0 * (1.0 - q));
    ex.gamma = (m * (N + 2.0) - q * (N - 2.0)) / (m * (N + 2.0) - q * N + 2.0);
    ex.gamma_complement =
        2.0 * (1.0 - q) / (m * (N + 2.0) - q * N + 2.0);
    ex.theta = 2.0 * N * m * (1.0 - q) /
               ((m + 1.0) * (m * (N + 2.0) - q * (N - 2.0)));
    ex.decay = 2.0 / (q - m);
    // (2m(m+q)/(q-m)^2)^{1/(q-m)}; overflows to +inf for tiny q-m
    ex.kappa_star = std::pow(2.0 * m * (m + q) / ((q - m) * (q - m)),
                             1.0 / (q - m));
    return ex;
}

double unit_sphere_area(double N) {
    return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

} // namespace fdabs
