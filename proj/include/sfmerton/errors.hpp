#pragma once

#include <stdexcept>
#include <string>

namespace sfm {

/// A model, contract, or integral argument outside its admissible domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Adaptive quadrature exhausted its refinement budget before meeting tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A special-case formula was requested for parameters of a different variant.
struct VariantMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeVariance : std::domain_error {
    using std::domain_error::domain_error;
};

/// Convergence-order fit impossible (floor-saturated or non-finite residuals).
struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The simulated subordinator lattice did not reach the requested horizon.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sfm
