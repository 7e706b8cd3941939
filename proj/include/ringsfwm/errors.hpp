#pragma once

#include <stdexcept>
#include <string>

namespace ringsfwm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveRate : Error {
    using Error::Error;
};

struct BadGridSpec : Error {
    using Error::Error;
};

struct UnsupportedOrder : Error {
    using Error::Error;
};

struct CarrierMismatch : Error {
    using Error::Error;
};

struct DegenerateKernel : Error {
    using Error::Error;
};

struct NotNormalized : Error {
    using Error::Error;
};

// Thrown when a minimum is not bracketed: K at one endpoint lies below both
// interior probes. side is -1 if the low endpoint undercuts, +1 if the high
// one does; the caller is expected to widen the bracket on that side.
struct BadBracket : Error {
    double k_lo, k_hi, k_inner_min;
    int side;
    BadBracket(const std::string& msg, double lo, double hi, double inner, int s)
        : Error(msg), k_lo(lo), k_hi(hi), k_inner_min(inner), side(s) {}
};

// Resolution ladder hit its cap before the requested tolerance. Carries the
// best available estimate so the caller can still inspect it.
struct NoConvergence : Error {
    double best_k;
    double achieved_error;
    int n_final;
    NoConvergence(const std::string& msg, double k, double err, int n)
        : Error(msg), best_k(k), achieved_error(err), n_final(n) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct UnknownKey : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace ringsfwm
