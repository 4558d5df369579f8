#include "fdabs/errors.hpp"

namespace fdabs {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::order_violation: return "OrderViolation";
        case Errc::sobolev_violation: return "SobolevViolation";
        case Errc::invalid_resolution: return "InvalidResolution";
        case Errc::invalid_domain: return "InvalidDomain";
        case Errc::newton_divergence: return "NewtonDivergence";
        case Errc::step_too_small: return "StepTooSmall";
        case Errc::non_extinction: return "NonExtinction";
        case Errc::not_extinguished: return "NotExtinguished";
        case Errc::time_out_of_range: return "TimeOutOfRange";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::unbounded: return "Unbounded";
        case Errc::empty_sweep: return "EmptySweep";
        case Errc::parse_error: return "ParseError";
        case Errc::validation_error: return "ValidationError";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace fdabs
