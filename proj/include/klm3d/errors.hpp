#pragma once

#include <stdexcept>
#include <string>

namespace klm3d {

// Base for all library errors. cli.cpp maps subclasses to process exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A direction vector collapsed below the degeneracy tolerance.
struct DegenerateGeometry : Error { using Error::Error; };

// Target width/size not positive where a model divides by it.
struct InvalidWidth : Error { using Error::Error; };

// Gaze Fitts coefficients requested above id_crit but not configured.
struct MissingCoefficients : Error { using Error::Error; };

// Scenario/layout dimensions violate their invariants.
struct InvalidLayout : Error { using Error::Error; };

struct EmptyScenario : Error { using Error::Error; };

// Too few records left for the requested statistic.
struct InsufficientData : Error { using Error::Error; };

struct InsufficientModalities : Error { using Error::Error; };

// Paired deltas are all identical; the Z statistic is undefined.
struct ZeroVariance : Error { using Error::Error; };

// Regression design matrix is rank deficient or has too few points.
struct DegenerateRegression : Error { using Error::Error; };

// Input file is not valid JSON/CSV at the byte level.
struct ParseError : Error { using Error::Error; };

// Input parsed but violates the expected schema; message names the field.
struct SchemaError : Error { using Error::Error; };

// Trial logs reference predictions that do not exist.
struct JoinError : Error { using Error::Error; };

// Raised by evaluate --gate when an equivalence verdict fails.
struct GateFailure : Error { using Error::Error; };

} // namespace klm3d
