#ifndef QREV_ERRORS_HPP
#define QREV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qrev {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid input parameters (preconditions, config values).
struct DomainError : Error {
    using Error::Error;
};

// The Mathieu reduction degenerates for a linear spectrum: q, nu and the
// characteristic value are undefined when zeta = 0.
struct VanishingNonlinearityError : DomainError {
    using DomainError::DomainError;
};

// Delta = (1 - 1/(N omega))^-1 diverges on resonance.
struct ResonanceSingularityError : DomainError {
    using DomainError::DomainError;
};

// |mu| -> 1 blows up the modification factors; the perturbative result is
// meaningless there.
struct PerturbationBreakdownError : DomainError {
    using DomainError::DomainError;
};

// Iterative solver failed to settle; message carries the last two iterates.
struct ConvergenceError : Error {
    using Error::Error;
};

// Finite-difference estimates at h and h/2 disagree beyond tolerance.
struct DerivativeInstabilityError : Error {
    using Error::Error;
};

// Wave packet support reaches the simulation box.
struct GridError : Error {
    using Error::Error;
};

// Norm or boundary drift during propagation.
struct InstabilityError : Error {
    using Error::Error;
};

} // namespace qrev

#endif
