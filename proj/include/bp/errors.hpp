#pragma once

#include <stdexcept>
#include <string>

namespace bp {

// Error hierarchy shared by the library and the CLI. The CLI maps each
// category to a fixed process exit code (see exit_code_for).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values, malformed configs, schema violations.
struct ValidationError : Error {
    using Error::Error;
};

// Malformed input files (CSV/JSON). A subcategory of validation.
struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

// Inputs too small or too trivial for the requested operation.
struct DegenerateInputError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitDegenerate = 3,
    kExitIo = 4,
};

}  // namespace bp
