#ifndef IMMINDEX_ERRORS_HPP
#define IMMINDEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace immindex {

/// Base class for all immindex errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must have full rank does not (Gram determinant below threshold).
class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// A combinatorial request exceeds the supported size guard.
class TooLargeError : public Error {
public:
    using Error::Error;
};

/// Operands have incompatible dimensions.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// An operation defined only for even domain dimension was called with odd n.
class OddDimensionError : public Error {
public:
    using Error::Error;
};

/// Lift precondition violated: the marked double point is not in the
/// canonical (-1/2,0,...,0) / (1/2,0,...,0) position, or the bump
/// function cannot separate its branches.
class PreimageMismatchError : public Error {
public:
    using Error::Error;
};

/// A converged self-intersection fails the transversality test.
class NonTransversalError : public Error {
public:
    using Error::Error;
};

/// The stacked Jacobian determinant at an intersection is numerically zero.
class DegenerateDeterminantError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace immindex

#endif
