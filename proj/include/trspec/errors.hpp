#pragma once

#include <stdexcept>
#include <string>

namespace trspec {

// Base class for all errors raised by this library. Each condition gets its
// own type so callers can react to specific failures without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linalg
struct NonSquare : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct OrderTooLarge : Error { using Error::Error; };

// model
struct DimensionMismatch : Error { using Error::Error; };
struct NonPositiveLength : Error { using Error::Error; };
struct NonPositiveDelta : Error { using Error::Error; };
struct IrrationalInputUnsupported : Error { using Error::Error; };
struct OddGrid : Error { using Error::Error; };

// perturb
struct DegenerateVelocities : Error { using Error::Error; };
struct BelowThreshold : Error { using Error::Error; };

// classify
struct NonPositiveRates : Error { using Error::Error; };
struct PreconditionUnmet : Error { using Error::Error; };

// simulate
struct GridTooCoarse : Error { using Error::Error; };
struct ImaginaryResidue : Error { using Error::Error; };
struct DegenerateData : Error { using Error::Error; };

} // namespace trspec
