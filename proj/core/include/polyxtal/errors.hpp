#ifndef POLYXTAL_ERRORS_HPP
#define POLYXTAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polyxtal {

/// Bad call-site input (out-of-range index, inconsistent shapes, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical kernel failed or produced values outside its contract.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point too close to the spectrum of the measure.
class PoleProximityError : public NumericalError {
public:
    PoleProximityError(const std::string& what, double nearest)
        : NumericalError(what), nearest_lambda(nearest) {}
    double nearest_lambda;
};

/// A full-column-rank precondition was violated.
class RankDeficientError : public NumericalError {
public:
    RankDeficientError(const std::string& what, long null_dim)
        : NumericalError(what), null_dimension(null_dim) {}
    long null_dimension;
};

/// Malformed experiment configuration; message carries the field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace polyxtal

#endif
