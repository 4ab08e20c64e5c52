#pragma once

#include <stdexcept>
#include <string>

namespace rbmpb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry
struct NotOnBoundaryError : Error { using Error::Error; };

// kernels
struct SingularityError : Error { using Error::Error; };

// sde
struct ReflectionFailure : Error { using Error::Error; };

// rbm
struct InvalidBatchSize : Error { using Error::Error; };

// reference_pde
struct NewtonFailure : Error {
    NewtonFailure(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual;
};

// observables
struct CoverageError : Error { using Error::Error; };
struct DegenerateReference : Error { using Error::Error; };

// cli_harness
struct ConfigError : Error { using Error::Error; };

}
