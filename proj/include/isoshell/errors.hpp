#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace isoshell {

/// Base class for numerical failures (a computation could not be completed).
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem posed outside its domain of validity (e.g. N above the existence
/// bound). The CLI maps these to exit code 2.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Newton iteration failed to reach the residual tolerance; carries the last
/// iterate and the residual norm history for diagnosis and for continuation
/// stepsize recovery.
class NoConvergenceError : public SolveError {
public:
    NoConvergenceError(const std::string& what, std::vector<double> iterate,
                       std::vector<double> residual_history)
        : SolveError(what),
          iterate(std::move(iterate)),
          residual_history(std::move(residual_history)) {}

    std::vector<double> iterate;
    std::vector<double> residual_history;
};

/// The Newton Jacobian factorization broke down; near a fold this signals the
/// loss of the implicit-function parametrization.
class SingularJacobianError : public SolveError {
public:
    explicit SingularJacobianError(const std::string& what) : SolveError(what) {}
};

/// The direct solve at the target parameter failed; the remedy is to start at
/// a lower parameter value and reach the target by continuation.
class InitialSolveFailedError : public SolveError {
public:
    explicit InitialSolveFailedError(const std::string& what) : SolveError(what) {}
};

}  // namespace isoshell
