#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace insulopt {

// Base class for all toolkit errors so callers can catch one type at the CLI
// boundary and map it to an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- configuration / input validation ---------------------------------------

struct ConfigError : Error {
    using Error::Error;
};

// Raised by the expression parser; `offset` is the byte offset of the first
// offending character in the source string.
struct ExprSyntaxError : ConfigError {
    ExprSyntaxError(std::size_t offset_, const std::string& expected_, const std::string& src)
        : ConfigError("syntax error at offset " + std::to_string(offset_) + " in \"" + src +
                      "\": expected " + expected_),
          offset(offset_),
          expected(expected_) {}
    std::size_t offset;
    std::string expected;
};

// Evaluation hit sqrt of a negative number or a division by zero.
struct ExprDomainError : Error {
    using Error::Error;
};

// --- geometry ----------------------------------------------------------------

// min k.n over the insulated boundary is not positive: the field is not a
// valid transversal direction.
struct NonTransversalError : Error {
    using Error::Error;
};

// The extruded layer folds over itself at the requested thickness.
struct SelfIntersectionError : Error {
    using Error::Error;
};

// Query point is not inside the extruded layer.
struct OutsideLayerError : Error {
    using Error::Error;
};

// --- meshing -----------------------------------------------------------------

struct MeshFailureError : Error {
    using Error::Error;
};

// --- linear algebra / solvers ------------------------------------------------

struct NegativeWeightError : Error {
    using Error::Error;
};

struct SingularSystemError : Error {
    using Error::Error;
};

struct NoConvergenceError : Error {
    NoConvergenceError(const std::string& what_, double residual_)
        : Error(what_), residual(residual_) {}
    double residual;
};

// --- optimization ------------------------------------------------------------

// |u - u_inf| vanishes identically on the insulated boundary; the material
// split is undefined.
struct DegenerateTraceError : Error {
    using Error::Error;
};

// --- verification ------------------------------------------------------------

// A convergence or inequality diagnostic did not meet its acceptance bound.
struct VerificationError : Error {
    using Error::Error;
};

}  // namespace insulopt
