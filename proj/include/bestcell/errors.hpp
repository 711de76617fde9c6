#pragma once

#include <stdexcept>
#include <string>

namespace bestcell {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quadrature (or a derived moment) failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

/// The CDMA power equation has no positive solution for the offered load.
class InfeasibleLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A search target cannot be reached on the permitted search range.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

}  // namespace bestcell
