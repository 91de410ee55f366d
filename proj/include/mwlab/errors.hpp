#pragma once
// Error taxonomy shared by every module. Each failure carries a message naming
// the offending quantity and, where available, a witness value. The CLI maps
// ConfigError (and subclasses) to exit code 2 and every other Error to 3.

#include <stdexcept>
#include <string>

namespace mwlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Metric not symmetric positive definite, bad boundary normal, etc.
struct GeometryError : Error { using Error::Error; };

// Point outside the admissible domain (e.g. |x| = 0 for radial families).
struct DomainError : Error { using Error::Error; };

// Ill-formed grid request (non-positive extent, too few nodes, ...).
struct GridError : Error { using Error::Error; };

// Invalid configuration or a request inconsistent with the configuration.
struct ConfigError : Error { using Error::Error; };

// Scenario file cannot be tokenized/parsed.
struct ParseError : ConfigError { using ConfigError::ConfigError; };

// Scenario parsed but violates the schema or semantic constraints.
struct ValidationError : ConfigError { using ConfigError::ConfigError; };

// Time step failed (non-finite field, fixed point did not converge, ...).
struct StepError : Error { using Error::Error; };

// Regression input invalid (non-positive energies, empty window, ...).
struct FitError : Error { using Error::Error; };

// Observability denominator vanishes; the ratio would be meaningless.
struct ObservabilityError : Error { using Error::Error; };

// Filesystem failures on report/snapshot emission.
struct IoError : Error { using Error::Error; };

} // namespace mwlab
