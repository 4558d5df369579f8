#pragma once

#include <stdexcept>
#include <string>

namespace fdabs {

/// Error taxonomy shared by all modules. Every throwing path carries one of
/// these codes so callers (and tests) can dispatch without string matching.
enum class Errc {
    order_violation,     // not 0 < m < q < 1
    sobolev_violation,   // m <= (N-2)+/N
    invalid_resolution,  // grid too coarse
    invalid_domain,      // R_max <= 0
    newton_divergence,   // nonlinear solve failed at current dt
    step_too_small,      // dt would fall below dt_min
    non_extinction,      // exceeded a-priori extinction bound
    not_extinguished,    // trajectory never reached the threshold
    time_out_of_range,   // t >= T_e in a rescaling map
    insufficient_data,   // too few records in a fit window
    unbounded,           // kappa0 fit not finite
    empty_sweep,         // sweep axes empty
    parse_error,         // config text malformed
    validation_error,    // config semantically invalid
    io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace fdabs
