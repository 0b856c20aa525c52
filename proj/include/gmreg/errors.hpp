#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gmreg {

// Incompatible dimensions between operator, data, or solution vectors.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input violates a documented precondition (non-finite entries, bad
// parameter range, too few sweep points, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The underlying factorization failed to converge.
class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Discrepancy-principle root finding could not bracket or locate a root.
class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fixed-point iteration hit the iteration cap before meeting the
// tolerance.  Carries the last iterate and its step norm so callers can
// inspect or salvage the partial result.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                     double residual)
        : std::runtime_error(what),
          last_iterate(std::move(last_iterate)),
          residual(residual) {}

    Eigen::VectorXd last_iterate;
    double residual;
};

// A check was requested at a point where it is undefined (for example a
// curvature corner on a degenerate sweep).
class NotApplicableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation at a point where the map or its derivative is singular
// (zero coordinate on a kept index).
class SingularPointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read, written, or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gmreg
