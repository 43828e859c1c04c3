#pragma once

#include <stdexcept>
#include <string>

namespace scencert {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear programming / kernel
struct MalformedProgram : Error { using Error::Error; };

// Geometry
struct InfeasibleSet : Error { using Error::Error; };
struct UnboundedSet : Error { using Error::Error; };
struct DegenerateInterior : Error { using Error::Error; };

// Certificates
struct DomainError : Error { using Error::Error; };
struct NoSolution : Error { using Error::Error; };

// Scenario / aggregative
struct EmptyFeasibleSet : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct IterationLimit : Error { using Error::Error; };
struct InfeasibleDomain : Error { using Error::Error; };
struct InfeasibleSampleConfig : Error { using Error::Error; };

}  // namespace scencert
