#ifndef EARDYN_ERRORS_HPP
#define EARDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eardyn {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration value; message names the violated bound.
struct ConfigError : Error {
    using Error::Error;
};

// Mismatched lengths, bands, or bin grids between operands.
struct ShapeError : Error {
    using Error::Error;
};

// Input that is structurally valid but numerically unusable
// (zero in-band probe energy, zero-variance feature, ...).
struct DegenerateError : Error {
    using Error::Error;
};

// Stream too short to produce even one unit of output.
struct EmptyInputError : Error {
    using Error::Error;
};

// Malformed text input; message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

// Parsed fine but violates a cross-record constraint.
struct ValidationError : Error {
    using Error::Error;
};

// Trace too short / too sparse for motion classification.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Sensor trace with physically implausible content.
struct InvalidTraceError : Error {
    using Error::Error;
};

// Ear-canal model parameter out of physical range.
struct ModelError : Error {
    using Error::Error;
};

// Enrollment with too few samples.
struct EnrollmentError : Error {
    using Error::Error;
};

// Degenerate training data (single class, no usable stump).
struct TrainError : Error {
    using Error::Error;
};

// Session shares no key with the trained classifier.
struct NoEvidenceError : Error {
    using Error::Error;
};

// Missing files, version mismatches, inconsistent datasets.
struct DataError : Error {
    using Error::Error;
};

// Caller broke a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

} // namespace eardyn

#endif
