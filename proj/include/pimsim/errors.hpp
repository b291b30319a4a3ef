#pragma once

#include <stdexcept>
#include <string>

namespace pimsim {

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationError : SimulationError {
    using SimulationError::SimulationError;
};

struct ConvergenceError : SimulationError {
    using SimulationError::SimulationError;
};

struct DimensionMismatch : SimulationError {
    using SimulationError::SimulationError;
};

struct IntegrationError : SimulationError {
    using SimulationError::SimulationError;
};

struct DegenerateSteadyState : SimulationError {
    using SimulationError::SimulationError;
};

struct EigensolverFailure : SimulationError {
    using SimulationError::SimulationError;
};

struct DomainError : SimulationError {
    using SimulationError::SimulationError;
};

struct KernelDegeneracy : SimulationError {
    using SimulationError::SimulationError;
};

struct ParseError : SimulationError {
    using SimulationError::SimulationError;
};

struct ValidationError : SimulationError {
    using SimulationError::SimulationError;
};

}  // namespace pimsim
