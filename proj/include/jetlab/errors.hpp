#pragma once

#include <stdexcept>
#include <string>

namespace jetlab {

/* Error taxonomy mirrors the CLI exit codes: I/O -> 2, syntax -> 3,
   semantic (unknown names, ill-posed systems, cap overruns) -> 4. */

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};

struct SyntaxError : Error {
    using Error::Error;
};

struct SemanticError : Error {
    using Error::Error;
};

// Rewrite or ansatz budget exhausted; ill-posed input rather than a bug.
struct CapError : SemanticError {
    using SemanticError::SemanticError;
};

} // namespace jetlab
