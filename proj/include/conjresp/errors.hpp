#pragma once

#include <stdexcept>
#include <string>

namespace conjresp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument shape: wrong axis, mismatched grids, bad dimension.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A positivity requirement was violated (division by a non-positive field).
class DomainError : public Error {
public:
    DomainError(const std::string& what, double min_value, std::size_t location)
        : Error(what), min_value_(min_value), location_(location) {}
    double min_value() const { return min_value_; }
    std::size_t location() const { return location_; }

private:
    double min_value_;
    std::size_t location_;
};

/// An input that must integrate to zero does not.
class NormalizationError : public Error {
public:
    NormalizationError(const std::string& what, double mean)
        : Error(what), mean_(mean) {}
    double mean() const { return mean_; }

private:
    double mean_;
};

/// An iterative solver stopped at its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A computed quantity failed a mass/positivity sanity check.
class NumericalQualityError : public Error {
public:
    NumericalQualityError(const std::string& what, double defect)
        : Error(what), defect_(defect) {}
    double defect() const { return defect_; }

private:
    double defect_;
};

/// A map construction failed its invariance certificate.
class ConstructionError : public Error {
public:
    ConstructionError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A check was asked for on an input outside its supported class.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration did not validate.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace conjresp
