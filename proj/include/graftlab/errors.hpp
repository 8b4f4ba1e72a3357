#pragma once

#include <stdexcept>
#include <string>

namespace graftlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// hyp2
struct NonHyperbolic : Error { using Error::Error; };
struct ProjectionUndefined : Error { using Error::Error; };
struct DegenerateTriple : Error { using Error::Error; };

// surface
struct ConstructionFailure : Error { using Error::Error; };
struct EnumerationInconclusive : Error { using Error::Error; };

// twisting
struct NoIntersection : Error { using Error::Error; };

// grafting
struct ZeroWeight : Error { using Error::Error; };

// spacetime
struct EmptyDomain : Error { using Error::Error; };
struct DegenerateFamily : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct NoPastStratum : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// runner
struct ConfigError : Error { using Error::Error; };

}  // namespace graftlab
